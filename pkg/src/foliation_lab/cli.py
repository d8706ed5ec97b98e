"""Command line runner: ``foliation-lab <subcommand> --config <file>``.

Configs are JSON objects describing one experiment.  Output is CSV with a
header row and 17 significant digits, written to a temporary file and
renamed into place so that a failed run never leaves partial output.

Exit codes: 0 success, 1 configuration error, 2 numeric failure, 3 self
test failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import apline, apode, circle, core, quasicrystal, skew
from .errors import (ConfigError, DisplacementSignError, FoliationError, InvalidSystemError,
                     NotApplicableError, NumericOverflowError, WindowExceededError)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_SELFTEST = 0, 1, 2, 3

FAMILIES = ("circle", "skew", "ap-line", "quasicrystal", "ap-ode")


# ---------------------------------------------------------------------------
# config validation


def _num(lo=None, hi=None, integer=False, lo_open=False):
    def check(key, v):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{key} must be a number")
        if integer and int(v) != v:
            raise ConfigError(f"{key} must be an integer")
        if not math.isfinite(v):
            raise ConfigError(f"{key} must be finite")
        if lo is not None and (v <= lo if lo_open else v < lo):
            raise ConfigError(f"{key} must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and v > hi:
            raise ConfigError(f"{key} must be <= {hi}")
        return int(v) if integer else float(v)
    return check


def _choice(*opts):
    def check(key, v):
        if v not in opts:
            raise ConfigError(f"{key} must be one of {', '.join(map(str, opts))}")
        return v
    return check


def _numlist(min_len=1, length=None):
    def check(key, v):
        if not isinstance(v, list) or len(v) < min_len or (length and len(v) != length):
            raise ConfigError(f"{key} must be a list of numbers"
                              + (f" of length {length}" if length else ""))
        return [_num()(key, x) for x in v]
    return check


def _terms(key, v):
    if not isinstance(v, list):
        raise ConfigError(f"{key} must be a list of [frequency, amplitude, phase]")
    out = []
    for t in v:
        if not isinstance(t, list) or len(t) != 3:
            raise ConfigError(f"each entry of {key} must be [frequency, amplitude, phase]")
        out.append(tuple(_num()(key, x) for x in t))
    return out


def _modes(key, v):
    if not isinstance(v, list):
        raise ConfigError(f"{key} must be a list of [k1, k2, k3, k4, amplitude, phase]")
    out = []
    for m in v:
        if not isinstance(m, list) or len(m) != 6:
            raise ConfigError(f"each entry of {key} must be [k1, k2, k3, k4, amplitude, phase]")
        k = [_num(integer=True)(key, x) for x in m[:4]]
        out.append((tuple(k), _num()(key, m[4]), _num()(key, m[5])))
    return out


def _string(key, v):
    if not isinstance(v, str):
        raise ConfigError(f"{key} must be a string")
    return v


COMMON = {
    "family": _choice(*FAMILIES),
    "seed": _num(0, integer=True),
    "output": _string,
    "N": _num(2, 10 ** 9, integer=True),
    "horizon": _num(0, lo_open=True),
    "T0": _num(0),
    "method": _choice("endpoint", "weighted", "cesaro"),
    "samples": _num(1, 10 ** 6, integer=True),
    "t": _num(0),
    "ratio": _num(1, lo_open=True),
}

FAMILY_KEYS = {
    "circle": {
        "model": _choice("rigid", "arnold", "conjugate"),
        "rho0": _num(), "omega": _num(), "K": _num(0, 1), "c": _num(), "rho": _num(),
        "x0": _num(), "grid": _num(2, 2 ** 16, integer=True), "q_max": _num(1, integer=True),
    },
    "skew": {
        "model": _choice("product", "qpf-arnold", "fibered-conjugate"),
        "omega": _num(), "K": _num(0, 1), "A": _num(), "c": _num(), "w": _numlist(),
        "x0": _numlist(2), "grid": _numlist(2), "rho": _num(),
    },
    "ap-line": {
        "a0": _num(), "terms": _terms, "cycles": _choice(True, False), "x0": _num(),
        "check": _choice(True, False), "K_bound": _num(1, 200, integer=True),
        "tol": _num(0, lo_open=True), "rho": _num(),
    },
    "quasicrystal": {
        "n": _num(0, 34, integer=True), "r": _num(0, lo_open=True),
        "amplitude": _num(), "c": _num(), "x0": _num(), "rho": _num(),
        "R": _num(0, lo_open=True), "center": _num(), "window_N": _num(0, lo_open=True),
        "anchors": _numlist(),
    },
    "ap-ode": {
        "modes": _modes, "alpha": _numlist(length=2), "beta": _numlist(length=2),
        "epsilon": _num(), "h": _num(0, 1, lo_open=True), "tolerance": _num(0, lo_open=True),
        "x0": _num(), "eps_grid": _numlist(), "eps_min": _num(), "eps_max": _num(),
        "eps_count": _num(1, 10 ** 5, integer=True), "rho": _num(),
    },
}


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e}") from e
    return validate_config(raw)


def validate_config(raw):
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "family" not in raw:
        raise ConfigError("config needs a 'family' key")
    fam = COMMON["family"]("family", raw["family"])
    allowed = {**COMMON, **FAMILY_KEYS[fam]}
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys for family {fam}: {', '.join(unknown)}")
    return {k: allowed[k](k, v) for k, v in raw.items()}


# ---------------------------------------------------------------------------
# building systems


def _golden():
    return (math.sqrt(5) - 1) / 2


def build_circle(cfg):
    model = cfg.get("model", "arnold")
    try:
        if model == "rigid":
            return circle.CircleLift.rigid(cfg.get("rho0", 0.25))
        if model == "conjugate":
            return circle.CircleLift.conjugate_rotation(cfg.get("rho", _golden()), cfg.get("c", 0.1))
        return circle.CircleLift.arnold(cfg.get("omega", 0.3), cfg.get("K", 0.5))
    except InvalidSystemError as e:
        raise ConfigError(str(e)) from e


def build_skew(cfg):
    model = cfg.get("model", "qpf-arnold")
    w = cfg.get("w", [_golden()])
    if model == "fibered-conjugate":
        return skew.SkewProductSystem.fibered_conjugate(cfg.get("omega", 0.3), cfg.get("c", 0.1), w)
    if model == "product":
        return skew.SkewProductSystem.product(cfg.get("omega", 0.3), w)
    return skew.SkewProductSystem.qpf_arnold(cfg.get("omega", 0.3), cfg.get("K", 0.8),
                                             cfg.get("A", 0.2), w)


def build_trigpoly(cfg):
    terms = cfg.get("terms", [])
    try:
        if cfg.get("cycles", False):
            return apline.TrigPoly.from_cycles(cfg.get("a0", 2.0), terms)
        return apline.TrigPoly(cfg.get("a0", 2.0), tuple(terms))
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _depth_for(cfg):
    # smallest even depth whose window holds orbits of the requested length
    if "n" in cfg:
        return cfg["n"] + cfg["n"] % 2
    speed = abs(cfg.get("c", 2.0)) + abs(cfg.get("amplitude", 0.3)) + 1.0
    need = speed * max(cfg.get("N", 10 ** 5), cfg.get("horizon", 0)) + 100.0
    n = 10
    while quasicrystal.GOLDEN ** (n + 2) / math.sqrt(5) * quasicrystal.GOLDEN < need:
        n += 2
    return n


def build_delone(cfg):
    X = quasicrystal.fibonacci_segment(_depth_for(cfg))
    phi = quasicrystal.PEDisplacement(X, quasicrystal.tent_kernel(cfg.get("r", 0.4), cfg.get("amplitude", 0.3)),
                                      cfg.get("r", 0.4), cfg.get("c", 2.0))
    return X, phi


def build_ode(cfg):
    field = apode.TorusFourierField(tuple(cfg.get("modes", [])))
    kw = {}
    if "alpha" in cfg:
        kw["alpha"] = tuple(cfg["alpha"])
    if "beta" in cfg:
        kw["beta"] = tuple(cfg["beta"])
    spec = apode.ODESpec(field, epsilon=cfg.get("epsilon", 0.0), **kw)
    icfg = apode.IntegratorConfig(cfg.get("h", 1e-3), cfg.get("tolerance", 1e-9))
    return spec, icfg


def build_system(cfg):
    fam = cfg["family"]
    if fam == "circle":
        return build_circle(cfg)
    if fam == "skew":
        return build_skew(cfg)
    if fam == "ap-line":
        return apline.LineMap(build_trigpoly(cfg))
    if fam == "quasicrystal":
        return quasicrystal.induced_line_map(build_delone(cfg)[1])
    spec, icfg = build_ode(cfg)
    return apode.TorusFlow(spec, icfg)


def _params(cfg):
    keep = {k: v for k, v in cfg.items() if k not in ("family", "output")}
    return json.dumps(keep, sort_keys=True, separators=(",", ":"))


def _start(cfg):
    fam = cfg["family"]
    if fam == "skew":
        return np.array(cfg.get("x0", [0.0, 0.0]))
    if fam == "ap-ode":
        return np.zeros(4)
    return np.array(cfg.get("x0", 0.0))


def _samples(cfg, count):
    rng = np.random.default_rng(cfg.get("seed", 0))
    fam = cfg["family"]
    if fam == "circle":
        return rng.random(count)
    if fam == "skew":
        return rng.random((count, build_skew(cfg).base_dim + 1))
    if fam == "ap-ode":
        return rng.random((count, 4))
    return rng.uniform(0.0, 10.0, count)


def _rho(cfg):
    fam = cfg["family"]
    N = cfg.get("N", 10 ** 5)
    method = cfg.get("method", "endpoint")
    if method == "cesaro" and fam != "ap-ode":
        x0 = _start(cfg) if fam == "skew" else float(cfg.get("x0", 0.0))
        trace = core.accumulate_trace(build_system(cfg), x0, N)
        return core.estimate_rho(trace, "cesaro")
    if fam == "circle":
        return circle.rotation_number(build_circle(cfg), cfg.get("x0", 0.0), N, method)
    if fam == "skew":
        return skew.fiber_rotation_number(build_skew(cfg), _start(cfg), N, method)
    if fam == "ap-line":
        return apline.kwapisz_rho(build_trigpoly(cfg), cfg.get("x0", 0.0), N, method,
                                  check=cfg.get("check", True))
    if fam == "quasicrystal":
        return quasicrystal.delone_rho(build_system(cfg), cfg.get("x0", 0.0), N, method)
    spec, icfg = build_ode(cfg)
    return apode.boundedness_check(spec, icfg, cfg.get("horizon", 100.0), cfg.get("x0", 0.0)).rho


def _rho_value(cfg):
    return cfg["rho"] if "rho" in cfg else _rho(cfg).rho_hat


# ---------------------------------------------------------------------------
# commands; each returns (header, rows)


def cmd_rho(cfg):
    est = _rho(cfg)
    return (["family", "params", "rho_hat", "cauchy_gap"],
            [[cfg["family"], _params(cfg), est.rho_hat, est.cauchy_gap]])


def cmd_deviation(cfg):
    fam = cfg["family"]
    rho = _rho_value(cfg)
    horizon = cfg.get("horizon", 10 ** 4)
    count = cfg.get("samples", 8)
    if fam == "ap-ode":
        spec, icfg = build_ode(cfg)
        prof = apode.boundedness_check(spec, icfg, horizon, cfg.get("x0", 0.0), rho=rho).profile
    elif fam == "skew":
        prof = skew.bmm_test(build_skew(cfg), rho, int(horizon), count, cfg.get("seed", 0))
    elif fam == "ap-line":
        prof = apline.line_deviation_profile(build_trigpoly(cfg), rho, _samples(cfg, count), int(horizon))
    elif fam == "quasicrystal":
        prof = quasicrystal.delone_deviation_profile(build_system(cfg), rho, _samples(cfg, count), int(horizon))
    else:
        trace = core.accumulate_trace(build_circle(cfg), _samples(cfg, count), int(horizon),
                                      "geometric", ratio=cfg.get("ratio", 2.0))
        prof = core.deviation_profile(trace, rho, cfg.get("ratio", 2.0))
    rows = [[T, D, prof.loglog_slope, prof.classification]
            for T, D in zip(prof.checkpoints, prof.deviations)]
    return ["checkpoint", "deviation", "slope", "classification"], rows


def _coord_names(pts):
    return ["x"] if pts.ndim == 1 else [f"x{i}" for i in range(pts.shape[1])]


def cmd_gamma(cfg):
    system = build_system(cfg)
    rho = _rho_value(cfg)
    horizon = cfg.get("horizon", 10 ** 4)
    fam = cfg["family"]
    if fam == "circle":
        pts = np.arange(cfg.get("grid", 64)) / cfg.get("grid", 64)
    else:
        pts = _samples(cfg, cfg.get("samples", 16))
    g = core.gamma_estimate(system, pts, rho, horizon, cfg.get("T0"))
    vals = np.atleast_1d(g.gamma_values)
    rows = [list(np.atleast_1d(p)) + [v, g.convergence_delta] for p, v in zip(pts, vals)]
    return _coord_names(pts) + ["gamma_hat", "convergence_delta"], rows


def cmd_semiconj(cfg):
    fam = cfg["family"]
    rho = _rho_value(cfg)
    horizon = cfg.get("horizon", 10 ** 4)
    t = cfg.get("t", 1)
    if fam == "circle":
        rep = circle.circle_semiconjugacy(build_circle(cfg), rho, cfg.get("grid", 64), horizon,
                                          cfg.get("T0"), t, cfg.get("q_max", 20))
        pts = np.arange(cfg.get("grid", 64)) / cfg.get("grid", 64)
    elif fam == "skew":
        grid = tuple(int(v) for v in cfg.get("grid", [16, 16]))
        s = build_skew(cfg)
        rep = skew.fiber_semiconjugacy(s, rho, grid, horizon, cfg.get("T0"), t)
        if len(grid) == 2 and s.base_dim > 1:
            grid = (grid[0],) * s.base_dim + (grid[1],)
        from .interp import uniform_grid
        pts = uniform_grid(grid)
    else:
        system = build_system(cfg)
        pts = _samples(cfg, cfg.get("samples", 8))
        gf = core.gamma_function(system, rho, horizon, cfg.get("T0"))
        rep = core.semiconjugacy_residual(system, rho, gf, pts, t)
    rows = [list(np.atleast_1d(p)) + [r, rep.residual_sup, horizon]
            for p, r in zip(pts, np.atleast_1d(rep.residuals))]
    return _coord_names(pts) + ["residual", "residual_sup", "horizon"], rows


def _eps_grid(cfg):
    if "eps_grid" in cfg:
        return np.array(cfg["eps_grid"])
    if "eps_min" in cfg or "eps_max" in cfg:
        return np.linspace(cfg.get("eps_min", 0.0), cfg.get("eps_max", 0.5), cfg.get("eps_count", 101))
    raise ConfigError("scan-eps needs eps_grid or eps_min/eps_max")


def cmd_scan_eps(cfg, threads=None):
    if cfg["family"] != "ap-ode":
        raise ConfigError("scan-eps applies to the ap-ode family")
    grid = _eps_grid(cfg)
    if np.any(np.diff(grid) < 0):
        raise ConfigError("eps_grid must be sorted")
    spec, icfg = build_ode(cfg)
    res = apode.epsilon_scan(spec, icfg, grid, cfg.get("horizon", 100.0), cfg.get("x0", 0.0), threads)
    rows = [[r.epsilon, r.rho_hat, r.cauchy_gap, r.deviation_max, int(r.blowup_flag)] for r in res.rows]
    return ["epsilon", "rho_hat", "cauchy_gap", "deviation_max", "blowup_flag"], rows


def cmd_qc_build(cfg, out):
    if cfg["family"] != "quasicrystal":
        raise ConfigError("qc-build applies to the quasicrystal family")
    if out is None:
        raise ConfigError("qc-build needs an output path (--out or 'output')")
    n = cfg.get("n", 10)
    rule = quasicrystal.SubstitutionRule.fibonacci()
    word = quasicrystal.iterate_substitution(rule, "L", n)
    seg = quasicrystal.word_to_delone(word, rule)
    _atomic_write(out + ".word.txt", word + "\n")
    _atomic_write(out + ".delone.txt", seg.to_text())


def cmd_qc_freq(cfg):
    if cfg["family"] != "quasicrystal":
        raise ConfigError("qc-freq applies to the quasicrystal family")
    X = quasicrystal.fibonacci_segment(cfg.get("n", 20) + cfg.get("n", 20) % 2)
    P = quasicrystal.patch_at(X, cfg.get("center", 0.0), cfg.get("R", 1.2))
    N = cfg.get("window_N", 1000.0)
    rep = quasicrystal.patch_frequency(X, P, N, cfg.get("anchors", [0.0]))
    rel = " ".join(format(v, ".17g") for v in P.relative_points)
    rows = [[a, c, f, rep.frequency_estimate, rep.uniformity_spread, rel, N]
            for a, c, f in zip(rep.anchors, rep.counts, rep.frequencies)]
    return ["anchor", "count", "frequency", "frequency_estimate", "uniformity_spread",
            "patch", "window_N"], rows


# ---------------------------------------------------------------------------
# self test


def selftest(out=sys.stdout):
    """Run the exact rigid-model examples and invariant spot checks."""
    checks = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except Exception as e:  # a crash is a failure, reported by name
            ok = False
            name = f"{name} ({type(e).__name__}: {e})"
        checks.append(ok)
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=out)

    rigid = circle.CircleLift.rigid(0.25)
    check("rigid rotation evolve t=4", lambda: abs(core.flow(rigid, 0.0, 4)[1] - 1.0) == 0
          and float(core.evolve(rigid, 0.0, 4)) % 1.0 == 0)
    check("flow identity t=0", lambda: float(core.evolve(rigid, 0.3, 0)) == 0.3)
    tr = core.accumulate_trace(rigid, 0.0, 100)
    check("rigid trace linear", lambda: np.max(np.abs(tr.tau_values - 0.25 * tr.times)) == 0)
    check("rigid rho", lambda: core.estimate_rho(tr).rho_hat == 0.25 and core.estimate_rho(tr).cauchy_gap == 0)
    check("rigid deviation zero", lambda: core.deviation_profile(tr, 0.25).bound == 0
          and core.deviation_profile(tr, 0.25).classification == "bounded")
    check("rigid wrong rho unbounded",
          lambda: core.deviation_profile(tr, 0.35).classification == "unbounded")
    check("rigid gamma zero", lambda: core.estimate_gamma(rigid, np.linspace(0, 1, 5), 0.25, 10, 100).max() == 0)
    check("rigid semiconjugacy", lambda: core.semiconjugacy_residual(
        rigid, 0.25, lambda x: np.zeros(np.shape(x)), np.linspace(0, 1, 7), 3).residual_sup == 0)
    check("cocycle identity s=t=0", lambda: core.check_cocycle_identity(rigid, 0.1, 0, 0) == 0)
    check("Arnold fixed point rho", lambda: circle.rotation_number(
        circle.CircleLift.arnold(0.0, 0.5), 0.0, 1000).rho_hat == 0)
    line = apline.LineMap(apline.TrigPoly.constant(1.0))
    check("constant line map", lambda: np.all(core.accumulate_trace(line, 0.0, 50).tau_values
                                              == np.arange(51)))
    check("kwapisz phi=1", lambda: apline.kwapisz_rho(apline.TrigPoly.constant(1.0), 0.0, 1000).rho_hat == 1)
    M1 = apline.FrequencyModule((1.0,))
    check("relation 0.5 vs {1}", lambda: apline.rational_independence(0.5, M1, 10, 1e-9).witness == (2, (1,)))
    check("sqrt2 independent", lambda: apline.rational_independence(math.sqrt(2), M1, 50, 1e-9).verdict
          == "independent")
    check("skew product rho", lambda: skew.fiber_rotation_number(
        skew.SkewProductSystem.product(0.3), np.zeros(2), 1000).rho_hat == 0.3)
    rule = quasicrystal.SubstitutionRule.fibonacci()
    check("Fibonacci L->LS", lambda: quasicrystal.iterate_substitution(rule, "L", 1) == "LS")
    check("Fibonacci n=3", lambda: quasicrystal.iterate_substitution(rule, "L", 3) == "LSLLS")
    spec = apode.ODESpec(apode.ZERO_FIELD, epsilon=0.25)
    icfg = apode.IntegratorConfig()
    check("constant field", lambda: abs(apode.integrate_xi(spec, icfg, 8.0, 0.5).xi - 2.5) <= 10 * icfg.tolerance)
    check("eps scan F=0", lambda: np.max(np.abs(apode.epsilon_scan(
        apode.ODESpec(apode.ZERO_FIELD), icfg, [0.0, 0.1, 0.2], 10.0).rho() - [0, 0.1, 0.2])) <= 1e-12)
    ok = all(checks)
    print(f"selftest: {sum(checks)}/{len(checks)} passed", file=out)
    return ok


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


COMMANDS = {
    "rho": cmd_rho,
    "deviation": cmd_deviation,
    "gamma": cmd_gamma,
    "semiconj": cmd_semiconj,
    "qc-freq": cmd_qc_freq,
}


def build_parser():
    p = argparse.ArgumentParser(prog="foliation-lab",
                                description="Numerics for foliation-preserving flows.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("rho", "deviation", "gamma", "semiconj", "scan-eps", "qc-build", "qc-freq"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON experiment file")
        sp.add_argument("--out", help="output path (default: stdout, or 'output' in the config)")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $FOLIATION_LAB_THREADS or 1)")
    sub.add_parser("selftest")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return EXIT_OK if selftest() else EXIT_SELFTEST
    try:
        cfg = load_config(args.config)
        out = args.out or cfg.get("output")
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if args.command == "qc-build":
            cmd_qc_build(cfg, out)
            return EXIT_OK
        if args.command == "scan-eps":
            header, rows = cmd_scan_eps(cfg, args.threads)
        else:
            header, rows = COMMANDS[args.command](cfg)
        text = render_csv(header, rows)
        if out:
            _atomic_write(out, text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericOverflowError, InvalidSystemError, DisplacementSignError,
            NotApplicableError, WindowExceededError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except FoliationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        # parameter combinations rejected by the library are config errors
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
