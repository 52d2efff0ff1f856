import argparse
import os
import sys

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from acceptance_engine import run_acceptance, summarize

parser = argparse.ArgumentParser(description='Run the acceptance sweeps and print a summary')
parser.add_argument('--criteria', type=str, default='', help='comma separated, e.g. 1,2,6')
parser.add_argument('--ranks', type=str, default='', help='comma separated, e.g. 0,1')
parser.add_argument('--seeds', type=int, default=0, help='override every seed count')
parser.add_argument('--no-persist', action='store_true')
args = parser.parse_args()

criteria = [int(x) for x in args.criteria.split(',') if x.strip()] or None
ranks = [int(x) for x in args.ranks.split(',') if x.strip()] or None
seeds = None
if args.seeds:
    from config import ACCEPTANCE_SEEDS
    seeds = {key: args.seeds for key in ACCEPTANCE_SEEDS}

frame = run_acceptance(criteria=criteria, ranks=ranks, seeds=seeds, persist=not args.no_persist)
print(frame.to_string(index=False))
print()
print(summarize(frame).to_string(index=False))

if not frame.empty and not bool(frame['ok'].all()):
    raise SystemExit('ACCEPTANCE_FAIL')
print('ACCEPTANCE_OK')
