"""``wittvec`` command line: gen, op, verify, bench.

Every option can also come from a ``key=value`` file given with ``--config``;
options on the command line win. Exit status is 0 on success, 1 when
verification finds a failure and 2 for usage or input errors.
"""

import argparse
import pathlib
import random
import sys

from .bench import BenchSpec, flip_one_coefficient, make_grid, run_bench, run_verify, write_csv
from .errors import ParseError, WittError
from .witt import Backend, WittContext, format_witt, parse_witt, random_witt, witt_op

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _choice(*allowed):
    def convert(text):
        if text not in allowed:
            raise ValueError(text)
        return text
    return convert


_op = _choice("add", "sub", "mul")
_backend = _choice(*(b.value for b in Backend))
_kind = _choice("per-var", "total")


def _int_list(text):
    text = str(text).strip()
    if not text:
        return []
    return [int(x) for x in text.split(",") if x.strip()]


def _str_list(text):
    return [x.strip() for x in str(text).split(",") if x.strip()]


def _flag(text):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# per command: option -> (converter, built-in default); a None default means required
OPTIONS = {
    "gen": {"p": (int, None), "d": (int, 1), "n": (int, None), "m": (int, 1),
            "deg": (int, 2), "deg_kind": (_kind, "per-var"), "seed": (int, 0),
            "count": (int, 1), "out": (str, None)},
    "op": {"op": (_op, None), "backend": (_backend, "illusie")},
    "verify": {"p": (_int_list, [2, 3]), "d": (_int_list, [1, 2]), "n": (_int_list, [1, 2, 3]),
               "m": (_int_list, [1, 2]), "deg": (int, 2), "deg_kind": (_kind, "total"),
               "seed": (int, 0), "samples": (int, 3), "inject_fault": (_flag, False)},
    "bench": {"sweep": (_choice("d", "n", "p", "q", "m"), None), "values": (_int_list, None), "p": (int, 3), "d": (int, 1),
              "n": (int, 2), "m": (int, 1), "deg": (int, 2), "deg_kind": (_kind, "per-var"),
              "seed": (int, 0), "backend": (_str_list, [b.value for b in Backend]),
              "op": (_str_list, ["add", "mul"]), "trials": (int, 5),
              "timeout_secs": (float, 60.0), "csv_out": (str, None), "mem": (_flag, False)},
}


class UsageError(Exception):
    pass


def read_config(path):
    """Parse a ``key=value`` file; blank lines and ``#`` comments are ignored."""
    values = {}
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}: expected key=value", lineno, 1)
        key, value = line.split("=", 1)
        values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return values


def build_parser():
    parser = argparse.ArgumentParser(prog="wittvec",
                                     description="Arithmetic in truncated Witt vectors W_n(F_q[X1..Xm]).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value file; command-line options override it")

    g = sub.add_parser("gen", help="write random Witt vectors")
    common(g)
    for name in ("p", "d", "n", "m", "deg", "seed", "count"):
        g.add_argument(f"--{name}")
    g.add_argument("--deg-kind", choices=["per-var", "total"])
    g.add_argument("--out", help="output file (with --count > 1, numbered files next to it)")

    o = sub.add_parser("op", help="apply one operation to two vector files")
    common(o)
    o.add_argument("file_a")
    o.add_argument("file_b")
    o.add_argument("--op", choices=["add", "sub", "mul"])
    o.add_argument("--backend", choices=[b.value for b in Backend])

    v = sub.add_parser("verify", help="check backend agreement and ring axioms on a grid")
    common(v)
    for name in ("p", "d", "n", "m"):
        v.add_argument(f"--{name}", help="comma-separated values")
    for name in ("deg", "seed", "samples"):
        v.add_argument(f"--{name}")
    v.add_argument("--deg-kind", choices=["per-var", "total"])
    v.add_argument("--inject-fault", action="store_const", const=True,
                   help="test hook: corrupt one naive-backend coefficient")

    b = sub.add_parser("bench", help="time the backends along one parameter sweep")
    common(b)
    b.add_argument("--sweep", choices=["d", "n", "p", "q", "m"],
                   help="swept parameter; d is the coefficient degree bound, q the field size")
    b.add_argument("--values", help="comma-separated sweep values")
    for name in ("p", "d", "n", "m", "deg", "seed", "trials"):
        b.add_argument(f"--{name}")
    b.add_argument("--deg-kind", choices=["per-var", "total"])
    b.add_argument("--backend", help="comma-separated subset of naive,illusie,phantom")
    b.add_argument("--op", help="comma-separated subset of add,sub,mul")
    b.add_argument("--timeout-secs")
    b.add_argument("--csv-out")
    b.add_argument("--mem", action="store_const", const=True,
                   help="add a peak_bytes column (traced allocations)")
    return parser


def resolve(args):
    """Merge command line, config file and built-in defaults into a dict."""
    spec = OPTIONS[args.command]
    config = read_config(args.config) if args.config else {}
    unknown = sorted(set(config) - set(spec))
    if unknown:
        raise UsageError(f"unknown config key(s) for {args.command}: {', '.join(unknown)}")
    out = {}
    for key, (convert, default) in spec.items():
        raw = getattr(args, key, None)
        if raw is None:
            raw = config.get(key)
        if raw is None:
            out[key] = default
            continue
        try:
            out[key] = convert(raw)
        except ValueError:
            raise UsageError(f"bad value for {key.replace('_', '-')}: {raw!r}") from None
    return out


def _require(opts, *keys):
    missing = [k for k in keys if opts.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + k for k in missing))


def cmd_gen(opts, stdout):
    _require(opts, "p", "n")
    if opts["count"] < 1:
        raise UsageError("--count must be >= 1")
    ctx = WittContext(opts["p"], opts["d"], opts["n"], opts["m"])
    rng = random.Random(opts["seed"])
    texts = [format_witt(random_witt(ctx, opts["deg"], opts["deg_kind"], rng))
             for _ in range(opts["count"])]
    if opts["out"] is None:
        stdout.write("".join(texts))
        return EXIT_OK
    out = pathlib.Path(opts["out"])
    if len(texts) == 1:
        out.write_text(texts[0])
    else:
        for k, text in enumerate(texts):
            out.with_name(f"{out.stem}_{k}{out.suffix}").write_text(text)
    return EXIT_OK


def _load(path):
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_witt(text)
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_op(opts, args, stdout):
    _require(opts, "op")
    a, b = _load(args.file_a), _load(args.file_b)
    stdout.write(format_witt(witt_op(opts["op"], a, b, Backend(opts["backend"]))))
    return EXIT_OK


def cmd_verify(opts, stdout, stderr):
    grid = make_grid(opts["p"], opts["d"], opts["n"], opts["m"])
    fault = flip_one_coefficient if opts["inject_fault"] else None
    first = []

    def log(message):
        if not first:
            first.append(message)
            stderr.write(f"first failure: {message}\n")

    report = run_verify(grid, opts["samples"], opts["seed"], opts["deg"], opts["deg_kind"],
                        fault=fault, log=log)
    stdout.write(report.summary() + "\n")
    return EXIT_OK if report.ok else EXIT_FAILURE


def cmd_bench(opts, stdout):
    _require(opts, "sweep", "values")
    try:
        backends = tuple(Backend(b) for b in opts["backend"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    spec = BenchSpec(sweep=opts["sweep"], values=opts["values"], p=opts["p"], d=opts["d"],
                     n=opts["n"], m=opts["m"], degree=opts["deg"], bound_kind=opts["deg_kind"],
                     ops=tuple(opts["op"]), backends=backends, trials=opts["trials"],
                     seed=opts["seed"], timeout=opts["timeout_secs"], memory=opts["mem"])
    spec.validate()
    if opts["csv_out"]:
        with open(opts["csv_out"], "w", newline="") as fh:
            write_csv(run_bench(spec), fh, spec.memory)
    else:
        write_csv(run_bench(spec), stdout, spec.memory)
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        opts = resolve(args)
        if args.command == "gen":
            return cmd_gen(opts, stdout)
        if args.command == "op":
            return cmd_op(opts, args, stdout)
        if args.command == "verify":
            return cmd_verify(opts, stdout, stderr)
        return cmd_bench(opts, stdout)
    except (UsageError, WittError) as exc:
        stderr.write(f"wittvec {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
