"""End-to-end acceptance suite.

Each test exercises one numbered criterion and prints a single
"ACCEPTANCE nn PASS/FAIL" line (run with -s to see them live). The demo
fixtures run the CLI end to end exactly as a user would.
"""
import json
import time

import numpy as np
import pytest

from contourflow import (
    ContourFlow,
    ce_loss,
    contour_flow,
    dice_loss,
    dice_score,
    boundary_distance,
    div_backward,
    grad_forward,
    loss_gradient,
    map_sigmoid,
    refine,
    shape_loss_2d,
    shape_loss_3d,
    signed_distance,
    synthesize,
)
from contourflow import io as cfio
from contourflow.cli import main

from oracles import brute_bd_bdsd, brute_signed_distance, random_mask


def _verdict(num: int, desc: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} - {desc}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def _run_demo(tmp_path_factory, case: str, *extra: str):
    wd = tmp_path_factory.mktemp(f"demo_{case}_{abs(hash(extra)) % 99999}")
    t0 = time.perf_counter()
    code = main(["demo", "--case", case, "--workdir", str(wd), *extra])
    elapsed = time.perf_counter() - t0
    assert code == 0
    summary = json.loads((wd / "summary.json").read_text())
    trace = json.loads((wd / "trace.json").read_text())
    return summary, trace, elapsed


@pytest.fixture(scope="module")
def noise_demo(tmp_path_factory):
    return _run_demo(tmp_path_factory, "noise")


@pytest.fixture(scope="module")
def patch_demo(tmp_path_factory):
    return _run_demo(tmp_path_factory, "patch")


@pytest.fixture(scope="module")
def patch_demo_deltas(tmp_path_factory):
    out = {}
    for delta in (0.1, 0.2, 0.3):
        out[delta] = _run_demo(tmp_path_factory, "patch", "--flow-delta", str(delta))
    return out


def test_criterion_01_noise_recovery(noise_demo):
    summary, _, elapsed = noise_demo
    ref = summary["refined"]
    unref = summary["unrefined"]
    ok = (
        ref["dice_percent"] >= 95.0
        and ref["dice_percent"] >= unref["dice_percent"] + 10.0
        and ref["bdsd"] <= unref["bdsd"]
        and elapsed <= 5.0
    )
    _verdict(
        1, "noise-corrupted recovery",
        ok,
        f"dice {unref['dice_percent']:.2f}->{ref['dice_percent']:.2f}, "
        f"bdsd {unref['bdsd']:.2f}->{ref['bdsd']:.2f}, {elapsed:.2f}s",
    )


def test_criterion_02_patch_recovery(patch_demo):
    summary, _, elapsed = patch_demo
    ref = summary["refined"]
    unref = summary["unrefined"]
    ok = (
        ref["dice_percent"] >= 90.0
        and ref["dice_percent"] >= unref["dice_percent"] + 10.0
        and elapsed <= 30.0
    )
    _verdict(
        2, "patch-corrupted recovery",
        ok,
        f"dice {unref['dice_percent']:.2f}->{ref['dice_percent']:.2f}, {elapsed:.2f}s",
    )


def test_criterion_03_flow_perturbation_robustness(patch_demo_deltas):
    details = []
    ok = True
    for delta, (summary, _, _) in sorted(patch_demo_deltas.items()):
        ref = summary["refined"]["dice_percent"]
        unref = summary["unrefined"]["dice_percent"]
        ok = ok and (ref > unref)
        details.append(f"d={delta}: {ref:.2f} vs {unref:.2f}")
    _verdict(3, "perturbed-flow refinement still beats baseline", ok, "; ".join(details))


def test_criterion_04_sdt_exactness():
    rng = np.random.default_rng(404)
    worst = 0.0
    sign_ok = True
    for _ in range(100):
        side = int(rng.integers(3, 65))
        other = int(rng.integers(3, 65))
        g = random_mask(rng, (side, other))
        phi = signed_distance(g)
        worst = max(worst, float(np.abs(phi - brute_signed_distance(g)).max()))
        from contourflow import boundary_pixels

        b = boundary_pixels(g).astype(bool)
        fg = g.astype(bool)
        sign_ok = sign_ok and (phi[b] == 0).all() and (phi[fg & ~b] > 0).all() and (
            phi[~fg] < 0
        ).all()
    for _ in range(20):
        g = random_mask(rng, tuple(int(rng.integers(3, 17)) for _ in range(3)))
        phi = signed_distance(g)
        worst = max(worst, float(np.abs(phi - brute_signed_distance(g)).max()))
    _verdict(4, "exact signed distances vs brute force", worst <= 1e-9 and sign_ok,
             f"max abs dev {worst:.2e}")


def test_criterion_05_adjoint_identity():
    rng = np.random.default_rng(505)
    worst = 0.0
    for shape, channels in (((8, 8), 2), ((16, 16, 16), 3)):
        for _ in range(50):
            u = rng.standard_normal(shape)
            v = rng.standard_normal(shape + (channels,))
            lhs = float((div_backward(v) * u).sum())
            rhs = float((v * grad_forward(u)).sum())
            worst = max(worst, abs(lhs + rhs) / (abs(lhs) + abs(rhs) + 1e-300))
    _verdict(5, "divergence is the negative adjoint of the gradient",
             worst <= 1e-10, f"max rel defect {worst:.2e}")


def test_criterion_06_alignment_residual_separates_shapes():
    _, disk = synthesize("disk", 128, radius=30)
    phi = signed_distance(disk)
    flow = contour_flow(phi)
    stats = []
    for c in (0.5, 1.0, 2.0):
        stats.append(shape_loss_2d(map_sigmoid(c * phi, 10.0), flow).per_pixel())
    _, shifted = synthesize("disk", 128, radius=30, center=(68.5, 63.5))
    off = shape_loss_2d(map_sigmoid(signed_distance(shifted), 10.0), flow).per_pixel()
    ok = all(s <= 1e-3 for s in stats) and off >= 1e-2
    _verdict(6, "matched contours score ~0, translated contours score high", ok,
             "aligned " + ", ".join(f"{s:.1e}" for s in stats) + f"; shifted {off:.1e}")


def test_criterion_07_first_sweep_closed_form():
    rng = np.random.default_rng(707)
    _, disk = synthesize("disk", 64, radius=18)
    flow = contour_flow(signed_distance(disk))
    o = rng.standard_normal((64, 64)) * 4.0
    one, _ = refine(o, flow, eps=10.0, tau=10.0, iters=1)
    exact_first = np.array_equal(one, map_sigmoid(o, 10.0))
    zero_flow = ContourFlow(field=np.zeros((64, 64, 2)),
                            defined_mask=np.zeros((64, 64), dtype=np.uint8))
    many, _ = refine(o, zero_flow, eps=3.0, tau=10.0, iters=23)
    exact_zero = np.array_equal(many, map_sigmoid(o, 3.0))
    _verdict(7, "first sweep and zero-flow runs equal the plain sigmoid bitwise",
             exact_first and exact_zero)


def test_criterion_08_orthogonality_progress(noise_demo, patch_demo):
    _, noise_trace, _ = noise_demo
    _, patch_trace, _ = patch_demo
    noise_res = noise_trace["orthogonality"]
    patch_res = patch_trace["orthogonality"]
    noise_ratio = noise_res[99] / noise_res[0]
    patch_ratio = patch_res[-1] / patch_res[0]
    ok = noise_ratio <= 0.1 and patch_ratio <= 0.1
    _verdict(8, "alignment residual drops 10x over each demo run", ok,
             f"noise t=100: {noise_ratio:.3f}; patch t=T: {patch_ratio:.3f}")


def test_criterion_09_gradient_checks():
    rng = np.random.default_rng(909)
    _, disk = synthesize("disk", 48, radius=14)
    flow = contour_flow(signed_distance(disk))
    g = random_mask(rng, (48, 48))
    u = np.clip(rng.uniform(0.1, 0.9, (48, 48)), 0.0, 1.0)

    def fd(total_fn, u, idx, h=1e-5):
        up, dn = u.copy(), u.copy()
        up[idx] += h
        dn[idx] -= h
        return (total_fn(up) - total_fn(dn)) / (2 * h)

    cases = {
        "ce": (lambda x: ce_loss(x, g).total, loss_gradient("ce", u, g=g)),
        "dice": (lambda x: dice_loss(x, g).total, loss_gradient("dice", u, g=g)),
        "shape2d": (
            lambda x: shape_loss_2d(x, flow).total,
            loss_gradient("shape2d", u, flow=flow),
        ),
    }
    worst = 0.0
    for name, (total_fn, grad) in cases.items():
        checked = 0
        trials = 0
        while checked < 20 and trials < 400:
            trials += 1
            idx = (int(rng.integers(0, 48)), int(rng.integers(0, 48)))
            est = fd(total_fn, u, idx)
            if abs(est) < 1e-6:  # kink or flat pixel; excluded by construction
                continue
            rel = abs(grad[idx] - est) / max(abs(est), abs(grad[idx]))
            worst = max(worst, rel)
            checked += 1
        assert checked == 20, name
    _verdict(9, "analytic loss gradients match finite differences",
             worst <= 1e-4, f"max rel err {worst:.2e}")


def test_criterion_10_metric_oracles():
    rng = np.random.default_rng(1010)
    worst = 0.0
    for _ in range(20):
        shape = (int(rng.integers(4, 65)), int(rng.integers(4, 65)))
        pred = random_mask(rng, shape)
        gt = random_mask(rng, shape)
        d = dice_score(pred, gt)
        d_oracle = 200.0 * (pred.astype(bool) & gt.astype(bool)).sum() / (
            pred.sum() + gt.sum()
        )
        worst = max(worst, abs(d - d_oracle))
        got = boundary_distance(pred, gt)
        want = brute_bd_bdsd(pred, gt)
        worst = max(worst, abs(got[0] - want[0]), abs(got[1] - want[1]))
    _, disk = synthesize("disk", 48, radius=12)
    identity = dice_score(disk, disk) == 100.0 and boundary_distance(disk, disk) == (0.0, 0.0)
    _verdict(10, "metrics equal brute-force oracles; identity is (100, 0, 0)",
             worst <= 1e-9 and identity, f"max abs dev {worst:.2e}")


def test_criterion_11_volume_loss_sanity():
    rng = np.random.default_rng(1111)
    phi = rng.standard_normal((8, 8, 8))
    zero_exact = shape_loss_3d(phi, phi).total == 0.0

    rr, cc, _ = np.mgrid[0:5, 0:5, 0:5].astype(float)
    ramped = shape_loss_3d(rr, cc)
    closed_form = abs(ramped.total - 80.0) < 1e-12  # unit cross product per live voxel

    u = rng.random((8, 8, 8))
    q = rng.random((8, 8, 8))
    gu = grad_forward(u)
    gq = grad_forward(q)
    acc = 0.0
    for idx in np.ndindex(8, 8, 8):
        acc += float(np.linalg.norm(np.cross(gu[idx], gq[idx])))
    oracle_ok = abs(shape_loss_3d(u, q).total - acc) <= 1e-12 * max(1.0, acc)
    _verdict(11, "volume cross-product loss: zero identity, unit case, oracle",
             zero_exact and closed_form and oracle_ok)


def test_criterion_12_serialization_roundtrips(tmp_path):
    rng = np.random.default_rng(1212)
    image = np.floor(rng.random((17, 23)) * 256).clip(0, 255)
    p = tmp_path / "img.pgm"
    cfio.write_pgm(p, image)
    pgm_ok = np.array_equal(cfio.read_pgm(p), image)

    field = rng.standard_normal((9, 7, 2))
    a, b = tmp_path / "a.cff", tmp_path / "b.cff"
    cfio.write_field(a, field, ndim=2)
    cfio.write_field(b, cfio.read_field(a), ndim=2)
    cff_ok = a.read_bytes() == b.read_bytes()

    report = {"dice_percent": 100.0, "bd": 0.123456789012345, "values": [1, 2, 3]}
    rp = tmp_path / "r.json"
    cfio.write_report(report, rp)
    json_ok = json.loads(rp.read_text()) == report
    _verdict(12, "file formats round-trip bit-exactly", pgm_ok and cff_ok and json_ok)
