"""
System Diagnostic Script
Health check of the run ledger: recent runs, failing checks and acceptance history.
"""

import sqlite3
import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

def main():
    try:
        import config
        db_path = config.DATABASE_PATH
    except Exception:
        db_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'data', 'grassnet.db'))

    if not os.path.exists(db_path):
        print(f"❌ Database not found: {db_path}")
        return

    conn = sqlite3.connect(db_path, timeout=30)
    cur = conn.cursor()

    print("="*80)
    print("🔍 GRASSNET LEDGER DIAGNOSTIC")
    print("="*80)

    # 1. RUNS
    print("\n📋 RUNS:")
    cur.execute("SELECT status, COUNT(*) FROM runs GROUP BY status ORDER BY COUNT(*) DESC")
    for status, cnt in cur.fetchall():
        print(f"  {status}: {cnt}")

    cur.execute("SELECT command, COUNT(*) FROM runs GROUP BY command ORDER BY command")
    print("  By command:")
    for command, cnt in cur.fetchall():
        print(f"    {command}: {cnt}")

    cur.execute("SELECT id, command, started_at, finished_at, status FROM runs ORDER BY id DESC LIMIT 5")
    print("  Latest:")
    for row in cur.fetchall():
        print(f"    #{row[0]} {row[1]} {row[2]} -> {row[3] or '...'} [{row[4]}]")

    # 2. CHECKS
    print("\n🧮 CHECK RESULTS:")
    cur.execute("SELECT kind, SUM(passed), COUNT(*) FROM check_results GROUP BY kind ORDER BY kind")
    rows = cur.fetchall()
    if not rows:
        print("  (none)")
    for kind, ok, total in rows:
        icon = "✅" if ok == total else "❌"
        print(f"  {icon} {kind}: {ok}/{total} passed")

    cur.execute("SELECT run_id, kind, location, detail FROM check_results WHERE passed = 0 ORDER BY id DESC LIMIT 10")
    failed = cur.fetchall()
    if failed:
        print("  Recent failures:")
        for run_id, kind, location, detail in failed:
            print(f"    run {run_id} {kind} at {location}: {detail}")

    # 3. ACCEPTANCE
    print("\n🧪 ACCEPTANCE HISTORY:")
    cur.execute("""
        SELECT criterion, rank, passed, failed, discarded, created_at
        FROM acceptance_results
        WHERE id IN (SELECT MAX(id) FROM acceptance_results GROUP BY criterion, rank)
        ORDER BY criterion, rank
    """)
    rows = cur.fetchall()
    if not rows:
        print("  (no sweeps recorded)")
    for criterion, rank, passed, failed_n, discarded, created in rows:
        icon = "✅" if not failed_n else "❌"
        print(f"  {icon} criterion {criterion} r={rank}: {passed} passed, {failed_n} failed, {discarded} discarded ({created})")

    # 4. LOGS
    print("\n🪵 RECENT ERRORS:")
    cur.execute("SELECT timestamp, module, message FROM system_logs WHERE level = 'ERROR' ORDER BY id DESC LIMIT 5")
    errors = cur.fetchall()
    if not errors:
        print("  ✅ none")
    for ts, module, message in errors:
        print(f"  ⚠️ {ts} [{module}] {message[:160]}")

    conn.close()
    print("\n" + "="*80)

if __name__ == "__main__":
    main()
