"""Command-line driver.

Named computations and parameter sweeps with CSV or JSON output, plus a
property-suite runner. Sweep grids are start:end:count (fractions such
as 4/3 allowed); outputs are deterministic for a fixed seed. Exit codes:
0 success, 2 argument error, 3 numerical failure (diagnostic JSON on
stderr). QBOUND_THREADS caps sweep parallelism.
"""
import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import dynamics, qcore, rains, reading


def _num(s):
    """Locale-free scalar: plain float or a fraction like 4/3."""
    if "/" in s:
        return float(Fraction(s))
    return float(s)


def parse_grid(spec):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError("grid must be start:end:count, got %r" % spec)
    start, end = _num(parts[0]), _num(parts[1])
    count = int(parts[2])
    if count < 1:
        raise ValueError("grid count must be >= 1")
    if count == 1:
        return [start]
    return list(np.linspace(start, end, count))


def _fmt(x):
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


def emit(args, meta, columns, rows):
    """Write one table in the requested format, UTF-8, grid order."""
    if args.format == "csv":
        lines = ["# " + ",".join("%s=%s" % kv for kv in sorted(meta.items()))]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        payload = {"meta": meta,
                   "rows": [dict(zip(columns, row)) for row in rows]}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pool():
    n = int(os.environ.get("QBOUND_THREADS", "1"))
    return ThreadPoolExecutor(max_workers=max(1, n))


def _sweep(fn, points):
    with _pool() as ex:
        return list(ex.map(fn, points))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_rains_state(args):
    d = args.d
    if args.state == "max-ent":
        rho = qcore.max_ent_state(d)
    elif args.state == "isotropic":
        f = args.param
        rho = f * qcore.max_ent_state(d) \
            + (1 - f) * np.eye(d * d, dtype=complex) / d ** 2
    elif args.state == "product":
        rho = np.eye(d * d, dtype=complex) / d ** 2
    else:
        raise ValueError("unknown state %r" % args.state)
    v, _ = rains.rmax_state(rho, (d, d), tol=args.tol)
    meta = {"quantity": "max_rains_state", "base": "bits",
            "tolerance": args.tol}
    emit(args, meta, ["state", "d", "value"], [[args.state, d, v]])
    return 0


def _named_channel(name, d, q, theta):
    if name == "identity":
        return qcore.identity_channel(d)
    if name == "depolarizing":
        return qcore.depolarizing(d, q)
    if name == "erasure":
        return qcore.erasure(d, q)
    if name == "dephasing":
        return qcore.dephasing(math.pi * q)
    if name == "gadc":
        return qcore.gadc(q, theta)
    raise ValueError("unknown channel %r" % name)


def cmd_rains_channel(args):
    qs = parse_grid(args.q_grid) if args.q_grid else [args.q]

    def point(q):
        ch = _named_channel(args.channel, args.d, q, args.theta)
        v, _ = rains.rmax_channel(ch, tol=args.tol)
        return [q, v]

    rows = _sweep(point, qs)
    meta = {"quantity": "max_rains_channel", "base": "bits",
            "tolerance": args.tol, "channel": args.channel}
    emit(args, meta, ["q", "value"], rows)
    return 0


def _bidir_channel(name, p, phi):
    if name == "swap":
        return qcore.partial_swap(0.0)
    if name == "identity":
        return qcore.BipartiteChannel(qcore.identity_channel(4),
                                      (2, 2), (2, 2))
    if name == "partial-swap":
        return qcore.partial_swap(p)
    if name == "swap-dephasing":
        return qcore.swap_then_collective_dephasing(p, phi)
    if name == "cnot":
        return qcore.cnot()
    raise ValueError("unknown bidirectional channel %r" % name)


def cmd_rains_bidir(args):
    ps = parse_grid(args.p_grid) if args.p_grid else [args.p]

    def point(p):
        N = _bidir_channel(args.channel, p, args.phi)
        r = rains.rmax_bidirectional(N, tol=args.tol)
        return [p, r["value"], r["gap"]]

    rows = _sweep(point, ps)
    meta = {"quantity": "max_rains_bidirectional", "base": "bits",
            "tolerance": args.tol, "channel": args.channel}
    emit(args, meta, ["p", "value", "primal_dual_gap"], rows)
    return 0


def cmd_capacity(args):
    if args.cell == "thermal":
        Ns = [_num(s) for s in args.photons.split(",")]
        v = reading.thermal_cell_capacity(Ns)
        meta = {"quantity": "thermal_cell_capacity", "base": "bits",
                "tolerance": 1e-10}
        emit(args, meta, ["photons", "value"], [[args.photons, v]])
        return 0
    qs = parse_grid(args.q_grid) if args.q_grid else [args.q]

    def point(q):
        ch = _named_channel(args.cell, args.d, q, args.theta)
        v = reading.covariant_cell_capacity(ch, qcore.hw_group(args.d))
        return [q, v]

    rows = _sweep(point, qs)
    meta = {"quantity": "covariant_cell_capacity", "base": "bits",
            "tolerance": 1e-10, "cell": args.cell}
    emit(args, meta, ["q", "value"], rows)
    return 0


def cmd_private_rate(args):
    qs = parse_grid(args.q_grid) if args.q_grid else [args.q]
    d = args.d

    def point(q):
        cell = reading.hw_probe_cell(d=d, q=q)
        phi = np.zeros(d * d, dtype=complex)
        for i in range(d):
            phi[i * d + i] = 1 / math.sqrt(d)
        p = np.full(len(cell), 1.0 / len(cell))
        rate = reading.private_reading_rate_n1(cell, p, phi)
        ci = reading.coherent_info_rate(cell, p, phi)
        return [q, rate, ci]

    rows = _sweep(point, qs)
    meta = {"quantity": "private_reading_rate_n1", "base": "bits",
            "tolerance": 1e-9}
    emit(args, meta, ["q", "rate", "coherent_info"], rows)
    return 0


def cmd_secure_read(args):
    rep = reading.secure_reading_deltas(args.kind, args.q, args.N,
                                        args.eta0, args.eta1,
                                        d=args.d, theta=args.theta)
    meta = {"quantity": "secure_reading_deltas", "base": "bits",
            "tolerance": 1e-10, "kind": args.kind}
    emit(args, meta, ["D_I", "D_C", "N_D_I", "N_D_C"],
         [[rep["D_I"], rep["D_C"], rep["N_D_I"], rep["N_D_C"]]])
    return 0


def cmd_dynamics(args):
    ts = list(np.linspace(0.0, args.t_max, args.steps + 1))
    if args.preset == "gadc":
        fam = dynamics.gadc_family(args.omega)
        rows = [[t, fam.f(t), fam.entropy_rate(t), fam.W(t)] for t in ts]
        cols = ["t", "witness_f", "entropy_rate", "population_gap"]
    elif args.preset == "damping":
        rows = []
        for t in ts:
            _, ds = dynamics.damping_trajectory(t)
            rows.append([t, ds])
        cols = ["t", "entropy_rate"]
    elif args.preset == "oscillatory":
        rows = []
        for t in ts:
            _, ds = dynamics.oscillatory_trajectory(t)
            rows.append([t, ds])
        cols = ["t", "entropy_rate"]
    else:
        raise ValueError("unknown preset %r" % args.preset)
    meta = {"quantity": "dynamics_" + args.preset, "base": "nats",
            "tolerance": 1e-9}
    emit(args, meta, cols, rows)
    return 0


def cmd_nonunitarity(args):
    qs = parse_grid(args.q_grid) if args.q_grid else [args.q]

    def point(q):
        ch = _named_channel(args.channel, args.d, q, args.theta)
        v = dynamics.nonunitarity(ch, tol=args.tol)
        return [q, v]

    rows = _sweep(point, qs)
    meta = {"quantity": "nonunitarity_diamond", "base": "dimensionless",
            "tolerance": args.tol, "channel": args.channel}
    emit(args, meta, ["q", "value"], rows)
    return 0


def cmd_props(args):
    from . import infomeasures as im
    rng = np.random.default_rng(args.seed)
    checks = []

    def record(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    # data processing under a random channel
    ok = True
    for _ in range(10):
        rho = qcore.random_density(3, rng)
        sig = qcore.random_density(3, rng)
        ch = qcore.depolarizing(3, float(rng.uniform(0.1, 0.9)))
        d0 = im.relative_entropy(rho, sig)
        d1 = im.relative_entropy(ch.apply(rho.matrix), ch.apply(sig.matrix))
        ok &= d1 <= d0 + 1e-9
    record("data_processing_relative_entropy", ok)

    # entropy rate vs finite differences
    ok = True
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    gen = dynamics.LindbladGenerator(np.zeros((2, 2)), [(1.0, A)])
    ts = np.linspace(0, 1, 6)
    traj = dynamics.evolve(gen, np.diag([0.3, 0.7]).astype(complex), ts)
    for t, r in zip(ts[1:], traj[1:]):
        num = dynamics.entropy_rate(r, gen.apply(t, r))
        rr = dynamics.evolve(gen, r, [t, t + 1e-6])[-1]
        rl = dynamics.evolve(gen, r, [t, t])[-1]
        s1 = -sum(v * math.log(v) for v in np.linalg.eigvalsh(rr) if v > 1e-15)
        s0 = -sum(v * math.log(v) for v in np.linalg.eigvalsh(rl) if v > 1e-15)
        ok &= abs((s1 - s0) / 1e-6 - num) < 1e-4
    record("entropy_rate_finite_difference", ok)

    # zero-error certificate
    rep = reading.zero_error_certificate()
    record("zero_error_certificate", rep["ok"],
           "residual %.2e" % rep["identity_residual"])

    # erasure wiretap rate
    cell = reading.hw_probe_cell(d=2, q=0.25)
    phi = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    p = np.full(4, 0.25)
    rate = reading.private_reading_rate_n1(cell, p, phi)
    record("erasure_wiretap_rate", abs(rate - 1.5) < 1e-8,
           "rate %.12f" % rate)

    rows = [[name, "pass" if ok else "fail", detail]
            for name, ok, detail in checks]
    meta = {"quantity": "property_suite", "base": "boolean",
            "tolerance": "per-check", "seed": args.seed}
    emit(args, meta, ["check", "status", "detail"], rows)
    return 0 if all(ok for _, ok, _ in checks) else 3


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="qbound",
        description="Entanglement measures, reading capacities and "
                    "dynamics witnesses for small quantum systems.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="output file (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("rains-state", parents=[common],
                       help="max-Rains value of a named bipartite state; "
                            "CSV columns: state,d,value")
    s.add_argument("--state", default="max-ent",
                   choices=["max-ent", "isotropic", "product"])
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--param", type=_num, default=1.0)
    s.add_argument("--tol", type=_num, default=1e-8)
    s.set_defaults(func=cmd_rains_state)

    s = sub.add_parser("rains-channel", parents=[common],
                       help="max-Rains information of a named channel; "
                            "CSV columns: q,value")
    s.add_argument("--channel", default="depolarizing")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--q", type=_num, default=0.0)
    s.add_argument("--q-grid")
    s.add_argument("--theta", type=_num, default=0.5)
    s.add_argument("--tol", type=_num, default=1e-8)
    s.set_defaults(func=cmd_rains_channel)

    s = sub.add_parser("rains-bidir", parents=[common],
                       help="bidirectional max-Rains information; CSV "
                            "columns: p,value,primal_dual_gap")
    s.add_argument("--channel", default="partial-swap",
                   choices=["swap", "identity", "partial-swap",
                            "swap-dephasing", "cnot"])
    s.add_argument("--p", type=_num, default=0.0)
    s.add_argument("--p-grid")
    s.add_argument("--phi", type=_num, default=math.pi)
    s.add_argument("--tol", type=_num, default=1e-9)
    s.set_defaults(func=cmd_rains_bidir)

    s = sub.add_parser("capacity", parents=[common],
                       help="reading capacity of a named cell; CSV "
                            "columns: q,value (thermal: photons,value)")
    s.add_argument("--cell", default="erasure",
                   choices=["erasure", "depolarizing", "identity",
                            "thermal"])
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--q", type=_num, default=0.0)
    s.add_argument("--q-grid")
    s.add_argument("--theta", type=_num, default=0.5)
    s.add_argument("--photons", default="0,1",
                   help="comma-separated mean photon numbers")
    s.set_defaults(func=cmd_capacity)

    s = sub.add_parser("private-rate", parents=[common],
                       help="private reading rate of the erasure wiretap "
                            "cell; CSV columns: q,rate,coherent_info")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--q", type=_num, default=0.0)
    s.add_argument("--q-grid")
    s.set_defaults(func=cmd_private_rate)

    s = sub.add_parser("secure-read", parents=[common],
                       help="per-site security parameters; CSV columns: "
                            "D_I,D_C,N_D_I,N_D_C")
    s.add_argument("--kind", choices=["depolarizing", "gadc"],
                   default="depolarizing")
    s.add_argument("--q", type=_num, default=0.005)
    s.add_argument("--N", type=int, default=1000)
    s.add_argument("--eta0", type=_num, default=0.8)
    s.add_argument("--eta1", type=_num, default=0.7)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--theta", type=_num, default=0.5)
    s.set_defaults(func=cmd_secure_read)

    s = sub.add_parser("dynamics", parents=[common],
                       help="witness/entropy-rate traces for analytic "
                            "families; CSV columns depend on preset")
    s.add_argument("--preset", choices=["gadc", "damping", "oscillatory"],
                   default="gadc")
    s.add_argument("--omega", type=_num, default=5.0)
    s.add_argument("--t-max", type=_num, default=5.0)
    s.add_argument("--steps", type=int, default=200)
    s.set_defaults(func=cmd_dynamics)

    s = sub.add_parser("nonunitarity", parents=[common],
                       help="diamond-norm nonunitarity sweep; CSV "
                            "columns: q,value")
    s.add_argument("--channel", default="depolarizing")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--q", type=_num, default=0.0)
    s.add_argument("--q-grid")
    s.add_argument("--theta", type=_num, default=0.5)
    s.add_argument("--tol", type=_num, default=1e-8)
    s.set_defaults(func=cmd_nonunitarity)

    s = sub.add_parser("props", parents=[common], help="run the quick property suite; CSV "
                                     "columns: check,status,detail")
    s.set_defaults(func=cmd_props)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse uses exit code 2 for parse errors already
        raise
    try:
        return args.func(args)
    except (ValueError, KeyError) as e:
        parser.exit(2, "argument error: %s\n" % e)
    except (ArithmeticError, np.linalg.LinAlgError) as e:
        diag = {"error": "numerical_failure", "detail": str(e),
                "subcommand": args.cmd}
        sys.stderr.write(json.dumps(diag) + "\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
