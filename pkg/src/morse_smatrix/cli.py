"""
morse-smatrix: tables, curves, grids and self-checks as CSV or JSON.

Exit status is 0 on success, 1 when a verification command finds a failing
check and 2 for usage errors (one line on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, scattering, states, verify
from .errors import MorseError
from .scattering import PotentialParams

RANGE_FLAGS = ("--im-range", "--k-range", "--re", "--im", "--x", "--index-range")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_range(text):
    """'lo:hi' -> (lo, hi) with lo < hi."""
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric range {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or not hi > lo:
        raise argparse.ArgumentTypeError(f"degenerate range {text!r}")
    return lo, hi


def parse_int_range(text):
    lo, hi = parse_range(text)
    if lo != int(lo) or hi != int(hi):
        raise argparse.ArgumentTypeError(f"integer range expected, got {text!r}")
    return int(lo), int(hi)


def _positive(text):
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _join_range_args(argv):
    """Glue '--flag -3:3' into '--flag=-3:3' so negative ranges parse."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in RANGE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def build_parser():
    parser = _Parser(prog="morse-smatrix", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--A", type=float, required=True, help="Morse strength A > 0")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("poles", parents=[common], help="pole table in an Im k window")
    p.add_argument("--im-range", type=parse_range, default=(-3.0, 3.0))

    p = sub.add_parser("smatrix", parents=[common], help="S(k) at given points or along real k")
    p.add_argument("--k", type=complex, action="append", help="complex k, e.g. 1.5 or 0.2+1j (repeatable)")
    p.add_argument("--k-range", type=parse_range)
    p.add_argument("--step", type=_positive, default=0.01)

    p = sub.add_parser("phase", parents=[common], help="phase shift and its derivative")
    p.add_argument("--k-range", type=parse_range, required=True)
    p.add_argument("--step", type=_positive, required=True)

    p = sub.add_parser("wavefunction", parents=[common], help="samples of one wavefunction")
    p.add_argument("--family", choices=[f.value for f in states.Family], required=True)
    p.add_argument("--n", type=int, help="family index (n1, n2 or m)")
    p.add_argument("--energy", type=complex, help="energy label for psi1/psi2")
    p.add_argument("--x", type=parse_range, default=(-2.0, 6.0))
    p.add_argument("--step", type=_positive, default=0.01)

    p = sub.add_parser("grid", parents=[common], help="|S| on a complex k grid")
    p.add_argument("--re", type=parse_range, required=True)
    p.add_argument("--im", type=parse_range, required=True)
    p.add_argument("--step", type=_positive, required=True)
    p.add_argument("--cap", type=_positive, default=1e6)

    p = sub.add_parser("ladder-verify", parents=[common], help="ladder identities and chains")
    p.add_argument("--index-range", type=parse_int_range, default=(-5, 5))

    sub.add_parser("verify-all", parents=[common], help="every self-check at this A")
    return parser


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return "%.16e" % v
    return str(v)


def _json_safe(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render_csv(meta, header, rows):
    lines = [f"# {k}={v}" for k, v in meta.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(meta, data):
    return json.dumps({"meta": _json_safe(meta), "data": _json_safe(data)}, indent=1, allow_nan=False) + "\n"


def write_output(text, path):
    """Write to stdout, or atomically to `path` via a temp file and rename."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".morse-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, params, header, rows, extra_meta=None, data=None):
    meta = {"A": params.A, "regime": params.regime_label, "command": args.command, "version": __version__}
    meta.update(extra_meta or {})
    if args.format == "csv":
        text = render_csv(meta, header, rows)
    else:
        text = render_json(meta, data if data is not None else [dict(zip(header, r)) for r in rows])
    write_output(text, args.output)


# ---------------------------------------------------------------------------
# commands


def cmd_poles(args, params):
    lo, hi = args.im_range
    rows = []
    for r in scattering.enumerate_poles(params, lo, hi):
        if r.net_order == 1:
            res = scattering.residue(params, r)
            rr, ri = res.real, res.imag
        else:
            rr = ri = math.nan
        rows.append(
            (r.pole_class.value, r.series_index, r.im_k, r.energy, r.net_order, rr, ri, r.cancellation_note)
        )
    header = ["class", "series_index", "im_k", "energy", "net_order", "residue_re", "residue_im", "cancellation_note"]
    _emit(args, params, header, rows, {"im_range": f"{lo}:{hi}"})
    return 0


def cmd_smatrix(args, params):
    if args.k:
        ks = list(args.k)
    elif args.k_range:
        ks = [complex(k) for k in scattering.make_axis(*args.k_range, args.step)]
    else:
        raise UsageError("smatrix needs --k or --k-range")
    rows = []
    for k in ks:
        s = scattering.s_matrix(params, k)
        rows.append((k.real, k.imag, s.real, s.imag, abs(s)))
    _emit(args, params, ["k_re", "k_im", "s_re", "s_im", "abs_s"], rows)
    return 0


def cmd_phase(args, params):
    lo, hi = args.k_range
    if lo <= 0:
        raise UsageError(f"phase needs k > 0, got range {lo}:{hi}")
    ks = scattering.make_axis(lo, hi, args.step)
    delta, dd = scattering.phase_shift_curve(params, ks)
    rows = list(zip(ks.tolist(), delta.tolist(), dd.tolist()))
    _emit(args, params, ["k", "delta", "Delta"], rows, {"k_range": f"{lo}:{hi}", "step": args.step})
    return 0


def cmd_wavefunction(args, params):
    spec = states.WaveFunctionSpec(states.Family(args.family), params, args.n, args.energy)
    xs = scattering.make_axis(*args.x, args.step)
    rows = []
    for x in xs:
        lv = states.evaluate_log(spec, x)
        try:
            v = states.evaluate(spec, x)
        except OverflowError:
            v = complex(math.nan, math.nan)
        rows.append((float(x), v.real, v.imag, lv.real))
    meta = {"family": spec.label(), "epsilon": spec.epsilon, "energy": spec.energy}
    _emit(args, params, ["x", "re_psi", "im_psi", "log_abs_psi"], rows, meta)
    return 0


def cmd_grid(args, params):
    g = scattering.s_matrix_grid(params, args.re, args.im, args.step, cap=args.cap)
    meta = {
        "re_range": "%g:%g" % args.re,
        "im_range": "%g:%g" % args.im,
        "step": args.step,
        "cap": args.cap,
    }
    header = ["k_im\\k_re"] + [_fmt(float(x)) for x in g.k_re]
    rows = [[float(t)] + row.tolist() for t, row in zip(g.k_im, g.values)]
    data = {"k_re": g.k_re.tolist(), "k_im": g.k_im.tolist(), "abs_s": g.values.tolist()}
    _emit(args, params, header, rows, meta, data)
    return 0


def _report(args, params, checks):
    rows = [(c.name, c.residual, c.tolerance, c.passed) for c in checks]
    data = [c.as_dict() for c in checks]
    _emit(args, params, ["check", "residual", "tolerance", "pass"], rows, None, data)
    return 0 if all(c.passed for c in checks) else 1


def cmd_ladder_verify(args, params):
    return _report(args, params, verify.ladder_checks(params, args.index_range))


def cmd_verify_all(args, params):
    return _report(args, params, verify.all_checks(params))


COMMANDS = {
    "poles": cmd_poles,
    "smatrix": cmd_smatrix,
    "phase": cmd_phase,
    "wavefunction": cmd_wavefunction,
    "grid": cmd_grid,
    "ladder-verify": cmd_ladder_verify,
    "verify-all": cmd_verify_all,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_range_args(argv))
        params = PotentialParams(args.A)
        return COMMANDS[args.command](args, params)
    except UsageError as exc:
        print(f"morse-smatrix: error: {exc}", file=sys.stderr)
        return 2
    except (MorseError, ValueError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"morse-smatrix: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
