import os
import sys

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from db.db import get_db

db = get_db()
counts = db.get_run_counts()

for key in sorted(counts):
    print(f'{key}:', counts[key])

recent = db.get_recent_runs(limit=5)
for run in recent:
    print(f"run {run['id']}: {run['command']} status={run['status']} started={run['started_at']}")

latest = db.get_acceptance_results(limit=50)
failing = [r for r in latest if (r.get('failed') or 0) > 0]
if failing:
    worst = failing[0]
    raise SystemExit(f"SANITY_FAIL: criterion {worst['criterion']} r={worst['rank']} had {worst['failed']} failures")

print('SANITY_OK')
