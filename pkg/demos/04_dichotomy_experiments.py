"""Monte Carlo experiments for the approximation dichotomy.

The rate family psi_s(3**n) = 3**-n * n**(-s/gamma) turns the governing
series sum_n n (3**n psi(3**n))**gamma into sum_n n**(1-s): divergent for
s <= 2, convergent for s > 2.  Random targets should rack up unboundedly
many certified hits in the divergent regime and plateau in the convergent
one; a Dirichlet-type witness always exists at every scale.
"""

from cantorapprox.approx_lab import (
    PowerLogPsi,
    best_approximations,
    dichotomy_series,
    dirichlet_check,
    khintchine_experiment,
    sample_point,
)
from cantorapprox.census import enumerate_by_denominator

# ---------------------------------------------------------------------------
# 1. The governing series, exactly
# ---------------------------------------------------------------------------

for s in (0, 1, 2, 3):
    ser = dichotomy_series(PowerLogPsi(s), 60)
    print(f"s={s}: S(60) = {float(ser.lower):.4f}  "
          f"({'divergent' if s <= 2 else 'convergent'} family)")

# ---------------------------------------------------------------------------
# 2. Hit counts: growth vs plateau
# ---------------------------------------------------------------------------

print("\nhit-count regimes (200 samples, levels up to 40):")
for s in (1, 3):
    rep = khintchine_experiment(PowerLogPsi(s), samples=200, digits=80, n_max=40, seed=7)
    print(
        f"  s={s}: mean hits {float(rep.mean_full):.2f} "
        f"(at half depth {float(rep.mean_half):.2f}), regime: {rep.regime}"
    )

# ---------------------------------------------------------------------------
# 3. Dirichlet-type witnesses at every scale
# ---------------------------------------------------------------------------

members = tuple(enumerate_by_denominator(243))
x = sample_point(99, 0, 60)
print("\nwitnesses for one random target:")
for Q in (9, 27, 81, 243):
    res = dirichlet_check(x, Q, members=members)
    w = res.witness
    print(f"  Q={Q:3d}: {w.p}/{w.q}")

# ---------------------------------------------------------------------------
# 4. Best approximations by intrinsic height
# ---------------------------------------------------------------------------

print("\nclosest members of height <= 729 to that target:")
for e in best_approximations(x, 729, top=5):
    flag = " *" if e.successive_minimum else ""
    print(
        f"  {e.rational.p}/{e.rational.q} (height {e.rational.q_int}): "
        f"distance in [{float(e.distance_lower):.3e}, {float(e.distance_upper):.3e}]{flag}"
    )
