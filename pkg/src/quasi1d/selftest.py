"""Built-in example battery: quick closed-form and sampled checks of every
module, runnable without the test suite via ``quasi1d selftest``.

Each check is a small assertion derived from an independent route (explicit
2x2 formulas, enumerated eigenvalues, group identities); statistical checks
use reduced sizes so the whole battery stays interactive.
"""

from __future__ import annotations

import math

import numpy as np

from . import liecheck, lyapunov, matkit, models, randsrc, spectra
from .errors import LogUndefined, NotHyperbolic
from .models import Energy, SeedSpec, Unimodular

_CHECKS = []


def _check(name):
    def deco(fn):
        _CHECKS.append((name, fn))
        return fn
    return deco


def _free_d1():
    return models.DiscreteQuasi1D(1, coupling=0.0)


def _bernoulli_d1(lam=1.0):
    return models.DiscreteQuasi1D(1, coupling=lam)


@_check("matkit.qr_pos identity and rotation")
def _():
    q, r = matkit.qr_pos(np.eye(3))
    assert np.allclose(q, np.eye(3)) and np.allclose(r, np.eye(3))
    th = 0.7
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    q, r = matkit.qr_pos(rot)
    assert np.allclose(q, rot, atol=1e-14) and np.allclose(r, np.eye(2), atol=1e-14)
    q, r = matkit.qr_pos(np.diag([2.0, 3.0]))
    assert np.allclose(q, np.eye(2)) and np.allclose(r, np.diag([2.0, 3.0]))


@_check("matkit.expm closed forms")
def _():
    assert np.allclose(matkit.expm(np.zeros((3, 3))), np.eye(3))
    nil = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(matkit.expm(nil), np.array([[1, 1], [0, 1]]), atol=1e-15)
    k = 1.3
    a = np.array([[0.0, 1.0], [-k * k, 0.0]])
    expected = np.array([[np.cos(k), np.sin(k) / k],
                         [-k * np.sin(k), np.cos(k)]])
    assert np.linalg.norm(matkit.expm(a) - expected, 2) < 1e-13


@_check("matkit.logm principal branch")
def _():
    assert np.allclose(matkit.logm_principal(np.eye(4)), 0.0)
    th = 0.1
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert np.allclose(matkit.logm_principal(rot),
                       np.array([[0, -th], [th, 0]]), atol=1e-13)
    try:
        matkit.logm_principal(np.diag([-1.0, 1.0]))
    except LogUndefined:
        pass
    else:
        raise AssertionError("negative-ray eigenvalue must be rejected")


@_check("matkit.wedge_power multiplicativity")
def _():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((4, 4))
    b = rng.standard_normal((4, 4))
    w_ab = matkit.wedge_power(a @ b, 2)
    w = matkit.wedge_power(a, 2) @ matkit.wedge_power(b, 2)
    assert np.linalg.norm(w_ab - w, 2) <= 1e-10 * np.linalg.norm(w, 2)
    assert np.allclose(matkit.wedge_power(a, 1), a)
    m2 = rng.standard_normal((2, 2))
    assert np.allclose(matkit.wedge_power(m2, 2), [[np.linalg.det(m2)]])


@_check("matkit.group_residual examples")
def _():
    j = matkit.symplectic_form(2)
    assert matkit.group_residual(j, matkit.GroupTag.symplectic(2)) < 1e-14
    assert matkit.group_residual(np.array([[1.0, 1.0], [0.0, 1.0]]),
                                 matkit.GroupTag.symplectic(1)) < 1e-14
    res = matkit.group_residual(np.diag([2.0, 1.0]), matkit.GroupTag.symplectic(1))
    assert abs(res - 1.0) < 1e-12


@_check("matkit.canonical_basis dimensions and algebra membership")
def _():
    assert len(matkit.canonical_basis("sp", 1)) == 3
    assert len(matkit.canonical_basis("sp", 2)) == 10
    assert len(matkit.canonical_basis("uDD", 1)) == 4
    j = matkit.symplectic_form(2)
    for x in matkit.canonical_basis("sp", 2):
        assert np.linalg.norm(x.T @ j + j @ x, 2) < 1e-14
    form = matkit.lorentz_form(2)
    for x in matkit.canonical_basis("uDD", 2):
        assert np.linalg.norm(x.conj().T @ form + form @ x, 2) < 1e-14


@_check("matkit.cayley_realify on identity and the form")
def _():
    d = 2
    assert np.allclose(matkit.cayley_realify(np.eye(2 * d, dtype=complex)),
                       np.eye(4 * d))
    y = matkit.cayley_realify(matkit.lorentz_form(d).astype(complex))
    assert matkit.group_residual(y, matkit.GroupTag.symplectic(2 * d)) < 1e-10


@_check("randsrc reproducibility and degenerate two-point law")
def _():
    seed = SeedSpec(42, realization=3)
    laws = (randsrc.Bernoulli01(0.3), randsrc.UniformInterval(-1, 1))
    a = randsrc.draw_site_block(seed, laws, 0, 500)
    b = randsrc.draw_site_block(seed, laws, 0, 500)
    assert np.array_equal(a, b)
    assert np.array_equal(randsrc.draw_site_vector(seed, laws, 137), a[137])
    law = randsrc.TwoPoint(0.0, 1.0, 1.0)
    assert np.all(randsrc.draw_site_block(SeedSpec(1), (law,), 0, 100) == 1.0)


@_check("randsrc.haar_unitary residual and circular mean")
def _():
    rng = randsrc.stream_rng(SeedSpec(7), randsrc.KIND_PROBE, 0)
    us = randsrc.haar_block(rng, 2000, 1)[:, 0, 0]
    assert abs(us.mean()) < 0.05
    u = randsrc.haar_unitary(SeedSpec(9), 4)
    assert matkit.group_residual(u, matkit.GroupTag.unitary(4)) < 1e-12


@_check("models.discrete_transfer unipotent quotient")
def _():
    spec = models.DiscreteQuasi1D(2)
    e = Energy(0.7)
    t1 = models.discrete_transfer(spec, e, np.array([0.2, 0.9])).matrix
    t2 = models.discrete_transfer(spec, e, np.array([1.0, 0.1])).matrix
    q = t1 @ np.linalg.inv(t2)
    v1 = spec.interaction + np.diag([0.2, 0.9])
    v2 = spec.interaction + np.diag([1.0, 0.1])
    expected = np.eye(4)
    expected[:2, 2:] = v1 - v2
    assert np.linalg.norm(q - expected, 2) < 1e-12


@_check("models.continuous_transfer scalar closed form")
def _():
    spec = models.ContinuousQuasi1D(1, cell=0.37, couplings=(1.0,),
                                    interaction=np.zeros((1, 1)))
    t = models.continuous_transfer(spec, Energy(4.0), np.zeros(1)).matrix
    ln = 2 * 0.37
    expected = np.array([[np.cos(ln), np.sin(ln) / 2.0],
                         [-2.0 * np.sin(ln), np.cos(ln)]])
    assert np.linalg.norm(t - expected, 2) < 1e-13


@_check("models.point_interaction_transfer block closed form")
def _():
    spec = models.PointInteractions(2, couplings=(1.0, 1.0))
    t = models.point_interaction_transfer(spec, Energy(2.0), np.zeros(2)).matrix
    al, be = 1.0, math.sqrt(3.0)
    u = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    uu = np.block([[u, np.zeros((2, 2))], [np.zeros((2, 2)), u]])
    r = np.array([
        [np.cos(al), 0, np.sin(al) / al, 0],
        [0, np.cos(be), 0, np.sin(be) / be],
        [-al * np.sin(al), 0, np.cos(al), 0],
        [0, -be * np.sin(be), 0, np.cos(be)],
    ])
    assert np.linalg.norm(t - uu @ r @ uu, 2) < 1e-10


@_check("models.unitary_anderson invariant form")
def _():
    spec = models.UnitaryAnderson(0.0, 1.0)
    t = models.unitary_anderson_transfer(spec, Unimodular(np.exp(0.3j)), 0.8, 1.1).matrix
    assert abs(t[0, 1]) < 1e-14 and abs(t[1, 0]) < 1e-14
    assert abs(abs(np.linalg.det(t)) - 1.0) < 1e-12
    spec = models.UnitaryAnderson(0.6, 0.8)
    q = models.unitary_anderson_form(spec)
    w = models.unitary_anderson_frame(spec)
    t = models.unitary_anderson_transfer(spec, Unimodular(np.exp(1.2j)), 0.4, 2.2).matrix
    tw = w.T @ t @ w
    assert matkit.group_residual(tw, matkit.GroupTag.lorentz(1)) < 1e-10
    assert np.linalg.norm(t.conj().T @ q @ t - q, 2) < 1e-12


@_check("models.scattering_matrix and phi_map closed forms")
def _():
    u = np.array([[1.0]])
    s = models.scattering_matrix(np.array([[0.0]]), u, u)
    assert np.allclose(s, [[0, 1], [1, 0]])
    rho = models._rho_pair(np.diag([0.5, 0.0]).astype(complex))[0]
    assert np.allclose(rho, np.diag([math.sqrt(3) / 2, 1.0]))
    r = 0.5
    s = models.scattering_matrix(np.array([[r]]), u, u)
    phi = models.phi_map(s)
    rr = math.sqrt(1 - r * r)
    assert np.allclose(phi, np.array([[1, -r], [-r, 1]]) / rr, atol=1e-13)
    assert abs(abs(phi[0, 0]) ** 2 - abs(phi[1, 0]) ** 2 - 1.0) < 1e-13


@_check("models.zipper factorization identity")
def _():
    spec = models.ScatteringZipper(2, np.diag([0.3, 0.5]).astype(complex))
    rng = randsrc.stream_rng(SeedSpec(11), randsrc.KIND_PROBE, 0)
    for _ in range(20):
        z = complex(np.exp(2j * np.pi * rng.random()))
        u0, v0, u1, v1 = randsrc.haar_block(rng, 4, 2)
        t = models.zipper_transfer(spec, Unimodular(z), (u0, v0, u1, v1)).matrix
        fac = (models.phi_map(models.scattering_matrix(spec.verblunsky, u0, v0) / z)
               @ models.phi_map(models.scattering_matrix(spec.verblunsky, u1, v1)))
        assert np.linalg.norm(t - fac, 2) < 1e-10
        assert matkit.group_residual(t, matkit.GroupTag.lorentz(2)) < 1e-10
    t0, t1 = models.zipper_hats(np.array([[0.5]]), 1.0)
    assert abs(t1[0, 0] - 2.0 / math.sqrt(3.0)) < 1e-14


@_check("models.build_finite_discrete free spectrum")
def _():
    h = models.build_finite_discrete(_free_d1(), 2, SeedSpec(0))
    n = 5
    expected = np.sort(-2 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
    assert np.allclose(np.sort(np.linalg.eigvalsh(h)), expected, atol=1e-12)
    assert np.array_equal(h, h.T)


@_check("models.build_extended_cmv unitarity")
def _():
    law = randsrc.FiniteSupport((0.2, 0.5j), (1.0, 1.0))
    u = models.build_extended_cmv(models.ExtendedCMV(law), 6, SeedSpec(3))
    assert matkit.group_residual(u, matkit.GroupTag.unitary(13)) < 1e-12


@_check("lyapunov free-lattice oracle (reduced n)")
def _():
    st = lyapunov.CocycleStream(_free_d1(), Energy(3.0), SeedSpec(1))
    res = lyapunov.lyap_spectrum(st, 20_000, 4, 10)
    target = math.log((3 + math.sqrt(5)) / 2)
    assert abs(res.exponents[0] - target) < 1e-3
    st0 = lyapunov.CocycleStream(_free_d1(), Energy(0.0), SeedSpec(1))
    res0 = lyapunov.lyap_spectrum(st0, 5_000, 2, 10)
    assert abs(res0.exponents[0]) < 1e-9


@_check("lyapunov wedge oracle agrees at p = 1")
def _():
    spec = _bernoulli_d1()
    st = lyapunov.CocycleStream(spec, Energy(0.5), SeedSpec(2))
    res = lyapunov.lyap_spectrum(st, 20_000, 6, 10)
    est, err = lyapunov.wedge_oracle(st, 1, 20_000, 6, 10)
    joint = math.hypot(res.std_errors[0], err)
    assert abs(est - res.exponents[0]) <= 4 * joint + 1e-4
    est2, _ = lyapunov.wedge_oracle(st, 2, 5_000, 2, 10)
    assert abs(est2) < 1e-10


@_check("lyapunov oseledets probe on the free hyperbolic point")
def _():
    st = lyapunov.CocycleStream(_free_d1(), Energy(3.0), SeedSpec(4))
    probe = lyapunov.oseledets_probe(st, 4_000)
    t = np.array([[-3.0, -1.0], [1.0, 0.0]])
    vals, vecs = np.linalg.eig(t)
    v_small = np.real(vecs[:, np.argmin(np.abs(vals))])
    v_small /= np.linalg.norm(v_small)
    align = abs(float(v_small @ probe.v_minus))
    assert align > 1 - 1e-8
    assert abs(probe.rate_minus + probe.gamma) < 0.1 * probe.gamma
    assert abs(probe.rate_plus - probe.gamma) < 0.1 * probe.gamma
    try:
        lyapunov.oseledets_probe(
            lyapunov.CocycleStream(_free_d1(), Energy(0.0), SeedSpec(4)), 2_000)
    except NotHyperbolic:
        pass
    else:
        raise AssertionError("elliptic free point must be rejected")


@_check("liecheck.lemma generators reach full dimension")
def _():
    rep = liecheck.check_lemma_spN(1, 0.0)
    assert rep.verdict == "Full" and rep.closure_dim == 3
    rep = liecheck.check_lemma_spN(3, 0.7)
    assert rep.verdict == "Full" and rep.closure_dim == 21
    single = liecheck.lie_closure([np.array([[0.0, 1.0], [0.0, 0.0]])], 3)
    assert single.closure_dim == 1 and single.verdict == "Proper"
    xyz = liecheck.lie_closure(matkit.canonical_basis("xyz", 3), 21)
    assert xyz.verdict == "Full" and xyz.closure_dim == 21


@_check("liecheck.zipper closures")
def _():
    rep = liecheck.zipper_lie_closure(1, 1.0, np.array([[0.5]]))
    assert rep.verdict == "Full" and rep.closure_dim == 4
    rep0 = liecheck.zipper_lie_closure(1, 1.0, np.array([[0.0]]))
    assert rep0.verdict == "Proper"


@_check("liecheck.disorder_interval worked example")
def _():
    v0 = np.array([[0.0, 1.0], [1.0, 0.0]])
    di = liecheck.disorder_interval(2, v0, (1.0, 1.0), 1.0, 0.5)
    assert abs(di.lam_min + 1.0) < 1e-12 and abs(di.lam_max - 2.0) < 1e-12
    assert abs(di.lam0 - 1.5) < 1e-12
    assert di.interval is not None
    assert abs(di.interval[0]) < 1e-12 and abs(di.interval[1] - 1.0) < 1e-12
    assert liecheck.disorder_interval(2, v0, (1.0, 1.0), 1.0, 0.7).interval is None


@_check("liecheck.log_transfer_identity near identity")
def _():
    spec = models.ContinuousQuasi1D(2, cell=0.01)
    res = liecheck.log_transfer_identity(spec, 0.3, np.array([1.0, 0.0]))
    assert res < 1e-10
    assert abs(liecheck.norm_X(np.zeros(2), 0.0, spec.interaction, (1, 1)) - 1.0) < 1e-12


@_check("spectra.eigensolve and free IDS midpoint")
def _():
    w = spectra.eigensolve_sym(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1.0, 2.0, 3.0])
    curve = spectra.ids_estimate(_free_d1(), np.array([0.0]), 100, 4, SeedSpec(0))
    assert abs(curve.values[0] - 0.5) < 0.01


@_check("spectra.spectrum_coverage discrete and unitary")
def _():
    cov = spectra.spectrum_coverage(_bernoulli_d1(), 60, 4, SeedSpec(5))
    assert cov.violations == 0
    ua = models.UnitaryAnderson(1 / math.sqrt(2), 1 / math.sqrt(2),
                                phase_law=randsrc.TwoPoint(0.0, math.pi / 2))
    cov = spectra.spectrum_coverage(ua, 60, 4, SeedSpec(5))
    assert cov.violations == 0


@_check("spectra.wegner trivial thresholds")
def _():
    spec = _bernoulli_d1()
    table = spectra.wegner_probe(spec, 0.5, (12,), 1e-9, 0.5, 200, SeedSpec(6))
    assert table.rows[0].probability == 1.0  # threshold ~ 1, wider than spectrum
    tight = spectra.wegner_probe(spec, 25.0, (12,), 2.0, 0.9, 200, SeedSpec(6))
    assert tight.rows[0].probability == 0.0  # energy far outside the spectrum


@_check("spectra.transport delta start and ballistic front")
def _():
    res = spectra.transport_probe(_free_d1(), 80, np.linspace(0.0, 30.0, 16),
                                  1, SeedSpec(0))
    assert res.m2[0] == 0.0
    assert abs(res.growth_exponent - 2.0) < 0.1


def run_all():
    """Run the battery; returns [(name, 'ok'|'FAIL'), ...]."""
    results = []
    for name, fn in _CHECKS:
        try:
            fn()
        except AssertionError:
            results.append((name, "FAIL"))
        except Exception:
            results.append((name, "FAIL"))
        else:
            results.append((name, "ok"))
    return results
