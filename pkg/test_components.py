"""
Quick test script to verify grassnet components
"""

import sys
import os
sys.path.insert(0, os.path.dirname(__file__))

print("🟨 grassnet - Component Test\n")

# Test 1: Database
print("1. Testing Database...")
try:
    from db.db import get_db
    db = get_db()
    print("   ✅ Database initialized successfully")
    print(f"   Database file: {db.db_path}")
except Exception as e:
    print(f"   ❌ Database error: {e}")

# Test 2: Exact linear algebra
print("\n2. Testing exact linear algebra...")
try:
    from core.linalg import RationalMatrix, inverse, rank
    m = RationalMatrix([[2, 1], [1, 1]])
    assert m @ inverse(m) == RationalMatrix.identity(2)
    print(f"   ✅ inverse exact, rank={rank(m)}")
except Exception as e:
    print(f"   ❌ Linear algebra error: {e}")

# Test 3: Cube propagation
print("\n3. Testing cube propagation...")
try:
    from engine.qnet import cube_inputs, propagate_cube_with_ledger
    from engine.sampler import get_sampler
    cube = get_sampler().sample_cube_data(0, 3, rng=1)
    X123, ledger = propagate_cube_with_ledger(*cube_inputs(cube, (0, 0, 0), (0, 1, 2)))
    print(f"   ✅ X_123 computed, generic={ledger.generic}")
    print(f"   Pairwise meets: {ledger.pairwise_meet_dims}")
except Exception as e:
    print(f"   ❌ Propagation error: {e}")

# Test 4: Darboux map
print("\n4. Testing discrete Darboux map...")
try:
    from fractions import Fraction
    from core.linalg import RationalMatrix
    from engine.darboux_system import darboux_map
    one = lambda p, q: RationalMatrix([[Fraction(p, q)]])
    value = darboux_map(one(1, 2), one(1, 3), one(1, 4), one(1, 5))
    assert value[0, 0] == Fraction(35, 57)
    print(f"   ✅ scalar map gives {value[0, 0]}")
except Exception as e:
    print(f"   ❌ Darboux map error: {e}")

# Test 5: Coefficient pipeline
print("\n5. Testing coefficient pipeline...")
try:
    from core.lattice import Region
    from engine.coefficients import coefficient_pipeline
    from engine.sampler import get_sampler
    region = Region((1, 1, 1))
    net = get_sampler().sample_propagated_net(3, 0, 3, region, rng=2)
    bundle = coefficient_pipeline(net, region)
    ok = all(passed for *_, passed in bundle.residuals(region))
    print(f"   {'✅' if ok else '❌'} linear problem residuals vanish: {ok}")
except Exception as e:
    print(f"   ❌ Pipeline error: {e}")

print("\n" + "="*50)
print("✅ Component test complete!")
print("\nNext steps:")
print("1. Run: python cli.py generate --n 3 --rank 0 --region 2,2,2 --out walls.jsonl")
print("2. Or: python scripts/run_acceptance_now.py --seeds 3")
