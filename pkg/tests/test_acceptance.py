"""Acceptance checks: ten end-to-end properties, one printed line each.

Run with -s to see the PASS/FAIL lines; each check also asserts, so the
suite fails loudly under plain pytest.
"""

import functools
import subprocess
import sys
import time

import numpy as np

from hedonic_match.core import coupling_objective, project
from hedonic_match.diagnostics import (
    check_compatibility_1d,
    check_purity,
    check_strictly_hedonic,
    check_tss_bilinear,
    check_tzss_bilinear,
    compute_prices,
    sample_splitting_sets,
    verify_stability,
)
from hedonic_match.core import DiscreteMeasure
from hedonic_match.instances import (
    counterexample_instance,
    counterexample_plane_coupling,
    random_instance,
)
from hedonic_match.solver import (
    brute_force,
    solve_hybrid,
    solve_tripartite_fixed_alpha,
)
from hedonic_match.surplus import (
    BilinearComponent,
    BilinearSurplus,
    CounterexampleSurplus,
    ExpCosSurplus,
    StrictlyHedonicSurplus,
    Supermodular1DSurplus,
    signature,
)

N_SEEDS = 50


def _report(num: int, slug: str, ok: bool, detail: str = "") -> bool:
    line = f"ACCEPTANCE {num:02d} {slug}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line)
    return ok


@functools.lru_cache(maxsize=1)
def _seeded_solves():
    """Solve the 50-seed corpus once: both routes plus the brute oracle."""
    t0 = time.perf_counter()
    rows = []
    for seed in range(N_SEEDS):
        inst = random_instance(seed)
        lifted = solve_hybrid(inst.surplus, inst.mu, inst.nu, inst.z_points,
                              method="reduce_lift")
        direct = solve_hybrid(inst.surplus, inst.mu, inst.nu, inst.z_points,
                              method="direct_lp")
        oracle = brute_force(inst.surplus, inst.mu, inst.nu,
                             z_points=inst.z_points)
        rows.append((inst, lifted, direct, oracle))
    return rows, time.perf_counter() - t0


def test_01_oracle_equivalence():
    rows, elapsed = _seeded_solves()
    worst = max(abs(lifted.objective - oracle.objective)
                for _, lifted, _, oracle in rows)
    ok = worst <= 1e-9 and elapsed < 5.0
    assert _report(1, "oracle-equivalence", ok,
                   f"{N_SEEDS} seeds, max |solve - brute| {worst:.3e}, "
                   f"{elapsed:.2f} s")


def test_02_zero_duality_gap_and_stability():
    rows, _ = _seeded_solves()
    worst_gap = 0.0
    all_stable = True
    for inst, lifted, direct, _ in rows:
        for res in (lifted, direct):
            worst_gap = max(worst_gap, res.duality_gap)
            rep = verify_stability(inst.surplus, res.coupling, res.potentials)
            all_stable = all_stable and rep.stable
    # the fixed-alpha solver carries a third potential; its SolveResult must
    # satisfy the same zero-gap and stability contract
    inst = random_instance(7, family="bilinear")
    alpha = DiscreteMeasure.uniform(inst.z_points)
    fixed = solve_tripartite_fixed_alpha(inst.surplus, inst.mu, inst.nu, alpha)
    worst_gap = max(worst_gap, fixed.duality_gap)
    rep = verify_stability(inst.surplus, fixed.coupling, fixed.potentials,
                           z_potential=fixed.z_potential)
    all_stable = all_stable and rep.stable
    ok = worst_gap <= 1e-9 and all_stable
    assert _report(2, "zero-duality-gap", ok,
                   f"max gap {worst_gap:.3e}, all stable: {all_stable}")


def test_03_route_equivalence_and_projection():
    rows, _ = _seeded_solves()
    worst = max(abs(lifted.objective - direct.objective)
                for _, lifted, direct, _ in rows)
    proj_worst = 0.0
    for _, lifted, direct, _ in rows:
        pair = project(direct.coupling, "xy")
        attained = coupling_objective(pair, lifted.reduction.values)
        proj_worst = max(proj_worst, abs(attained - lifted.objective))
    ok = worst <= 1e-9 and proj_worst <= 1e-9
    assert _report(3, "reduce-lift-vs-direct", ok,
                   f"max route diff {worst:.3e}, "
                   f"max projection defect {proj_worst:.3e}")


def test_04_counterexample_reproduction():
    inst = counterexample_instance()
    stab = verify_stability(inst.surplus, inst.coupling, inst.potentials)
    a_ok = stab.stable and stab.max_support_residual <= 1e-12

    b_ok = not check_purity(inst.coupling).pure

    table = compute_prices(inst.surplus, inst.coupling, inst.potentials)
    half_x_sq = 0.5 * inst.mu.points[:, 0] ** 2
    c_ok = all(abs(row["p_buyer"] - half_x_sq[row["i"]]) <= 1e-10
               and abs(row["p_seller"] - half_x_sq[row["i"]]) <= 1e-10
               for row in table.rows)

    como = counterexample_plane_coupling(inst.mu, inst.nu, inst.z_points,
                                         mode="comonotone")
    anti = counterexample_plane_coupling(inst.mu, inst.nu, inst.z_points,
                                         mode="anticomonotone")
    v1 = coupling_objective(como, inst.surplus)
    v2 = coupling_objective(anti, inst.surplus)
    distinct = not np.array_equal(como.indices, anti.indices)
    d_ok = abs(v1 - v2) <= 1e-12 and distinct

    ok = a_ok and b_ok and c_ok and d_ok
    assert _report(4, "counterexample-reproduction", ok,
                   f"stable+residual {a_ok}, impure {b_ok}, "
                   f"prices {c_ok}, non-unique {d_ok}")


def test_05_signature_checks():
    expcos = ExpCosSurplus()
    rng = np.random.default_rng(42)
    expcos_ok = True
    for _ in range(10):
        x, y, z = rng.uniform(-0.9, 0.9, (3, 2))
        rep = signature(expcos, x, y, z)
        expcos_ok = expcos_ok and rep.signature == (2, 4, 0)
        if rep.cross_check is not None:
            expcos_ok = expcos_ok and rep.cross_check.consistent

    cx = signature(CounterexampleSurplus(0.5), [0.75], [0.25], [0.5])
    cx_ok = (np.max(np.abs(np.sort(cx.eigenvalues) - [-2.0, 1.0, 1.0])) <= 1e-10
             and cx.dimension_bound == 2
             and cx.cross_check is not None and cx.cross_check.consistent)

    xyz = signature(Supermodular1DSurplus((1, 1, 1)), [1.0], [1.0], [1.0])
    xyz_ok = (np.max(np.abs(np.sort(xyz.eigenvalues) - [-1.0, -1.0, 2.0])) <= 1e-10
              and xyz.dimension_bound == 1
              and xyz.cross_check is not None and xyz.cross_check.consistent)

    ok = expcos_ok and cx_ok and xyz_ok
    assert _report(5, "signature-checks", ok,
                   f"expcos(2,4,0) {expcos_ok}, counterexample {cx_ok}, "
                   f"xyz {xyz_ok}")


def test_06_twist_criteria():
    family_ok = True
    for a, expect, verdict in ((0.25, 0.5, "holds"), (0.5, 0.0, "fails"),
                               (1.0, -1.0, "holds")):
        rep = check_tzss_bilinear(*CounterexampleSurplus(a).tzss_blocks())
        family_ok = family_ok and rep.details["criterion_value"] == expect
        family_ok = family_ok and rep.verdict == verdict

    tss_ok = check_tss_bilinear(np.eye(1), np.eye(1), np.eye(1)).verdict == "holds"

    pts = [([0.5], [0.5], [0.5]), ([1.0], [0.5], [0.25])]
    comp_xyz = check_compatibility_1d(Supermodular1DSurplus((1, 1, 1)), pts)
    comp_cx = check_compatibility_1d(CounterexampleSurplus(0.5),
                                     [([0.75], [0.25], [0.5])])
    comp_ok = comp_xyz.verdict == "holds" and comp_cx.verdict == "fails"

    ok = family_ok and tss_ok and comp_ok
    assert _report(6, "twist-criteria", ok,
                   f"tzss family exact {family_ok}, tss(I,I,I) {tss_ok}, "
                   f"compatibility {comp_ok}")


def test_07_splitting_set_sampling():
    inst = counterexample_instance()
    V = 0.5 * inst.nu.points[:, 0] ** 2

    samples, rep_half = sample_splitting_sets(
        inst.surplus, inst.mu.points, V, inst.nu.points, inst.z_points)
    at_half = [s for s in samples if s.x[0] == 0.5]
    fat_ok = False
    if len(at_half) == 1:
        # every (y, 0.5 - y) ties in value and shares the gradient y + z = 0.5
        x_idx = [s.x[0] for s in samples].index(0.5)
        clusters = rep_half.details["cluster_sizes"][x_idx]
        members = {tuple(map(tuple, pts)) for pts in at_half[0].member_points}
        fat_ok = (max(clusters) >= 3 and len(members) >= 3
                  and rep_half.verdict == "fails")

    _, rep_one = sample_splitting_sets(
        CounterexampleSurplus(1.0), inst.mu.points, V, inst.nu.points,
        inst.z_points)
    singleton_ok = rep_one.verdict == "holds" and all(
        size == 1 for sizes in rep_one.details["cluster_sizes"]
        for size in sizes)

    ok = fat_ok and singleton_ok
    assert _report(7, "splitting-set-sampling", ok,
                   f"fat cluster at a=1/2: {fat_ok}, "
                   f"singletons at a=1: {singleton_ok}")


def test_08_gradient_finite_difference_suite():
    families = [
        BilinearSurplus(A=[[0.7]], B=[[-0.4]], C=[[1.2]], D=[[-0.5]],
                        f=[0.0, 0.3], g=[0.0, -0.6], h=[0.1, 0.2]),
        CounterexampleSurplus(0.5),
        CounterexampleSurplus(1.0),
        Supermodular1DSurplus((2, 1, 3), scale=1.2),
        ExpCosSurplus(),
        StrictlyHedonicSurplus(BilinearComponent([[1.0]], Dz=[[-1.0]]),
                               BilinearComponent([[0.9]], h=[0.0, 0.1])),
    ]
    h = 1e-5
    worst = 0.0
    rng = np.random.default_rng(8)
    for s in families:
        dx, dy, dz = s.dims
        for _ in range(100):
            x = rng.uniform(0.2, 0.9, dx)
            y = rng.uniform(0.2, 0.9, dy)
            z = rng.uniform(0.2, 0.9, dz)
            for grad, p, rebuild in (
                (s.grad_x, x, lambda q: (q, y, z)),
                (s.grad_y, y, lambda q: (x, q, z)),
                (s.grad_z, z, lambda q: (x, y, q)),
            ):
                analytic = np.asarray(grad(x, y, z), dtype=float)
                fd = np.zeros_like(analytic)
                for d in range(p.size):
                    hi = p.copy(); hi[d] += h
                    lo = p.copy(); lo[d] -= h
                    fd[d] = (s.value(*rebuild(hi)) - s.value(*rebuild(lo))) / (2 * h)
                worst = max(worst, float(np.max(np.abs(analytic - fd))))
    ok = worst <= 1e-6
    assert _report(8, "finite-difference-suite", ok,
                   f"{len(families)} families x 100 points, "
                   f"max deviation {worst:.3e}")


def test_09_fixed_alpha_point_mass():
    u = BilinearComponent([[1.0]], Dz=[[-1.0]])   # u = xz - z²
    v = BilinearComponent([[1.0]])                # v = yz
    s = StrictlyHedonicSurplus(u, v)
    mu = DiscreteMeasure([[0.2], [0.5], [0.8]], [0.25, 0.5, 0.25])
    nu = DiscreteMeasure([[0.3], [0.6], [0.9]], [0.3, 0.3, 0.4])
    z0 = 0.4
    alpha = DiscreteMeasure([[z0]], [1.0])
    res = solve_tripartite_fixed_alpha(s, mu, nu, alpha)
    # one good only: the surplus decomposes buyer-by-buyer and seller-by-seller
    expected = float(
        mu.weights @ np.array([u.value([x], [z0]) for x in mu.points[:, 0]])
        + nu.weights @ np.array([v.value([y], [z0]) for y in nu.points[:, 0]]))
    decomposed = abs(res.objective - expected) <= 1e-9
    ok = decomposed and res.degenerate_optimum and res.duality_gap <= 1e-9
    assert _report(9, "fixed-alpha-point-mass", ok,
                   f"objective matches decomposition {decomposed}, "
                   f"degenerate flag {res.degenerate_optimum}")


def test_10_deterministic_solve(tmp_path):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        cmd = [sys.executable, "-m", "hedonic_match.cli", "solve",
               "--random-instance", "11", "--out", str(out)]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(out)
    names = ("solve_result.json", "coupling.json", "potentials.csv")
    identical = all((outs[0] / n).read_bytes() == (outs[1] / n).read_bytes()
                    for n in names)
    assert _report(10, "byte-identical-artifacts", identical,
                   "two fresh-process runs, three artifacts each")
