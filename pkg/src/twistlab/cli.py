"""Command line runner: one subcommand per experiment kind.

Every run resolves a config (file, then flag overrides), executes the scan,
and writes a JSON report embedding that config, the tool version and one
verdict per check.  Exit codes: 0 all checks pass, 2 some check failed,
1 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Optional

from . import __version__
from .farey import Slope, exceptional_bound, twist_coset_distance_scan
from .groups import BUILTIN_GROUPS, builtin_group
from .heegaard import (
    HeegaardData,
    LEFT,
    RIGHT,
    coset_scan,
    lens_space,
    random_heegaard,
    standard_a_system,
    standard_b_system,
)
from .homology import (
    TwistWord,
    chain_curve_classes,
    fixed_class_coset_scan,
    is_primitive,
    spectral_radius_enclosure,
    unit,
    word_to_matrix,
)
from .linalg import IntMatrix, determinant, is_prime, smith_normal_form
from .rng import SplitMix64
from .topology import SubsetOracle, Window, finite_order_collapse, openness_probe

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2
KINDS = {
    "topology": "topology-probe",
    "heegaard": "heegaard-scan",
    "farey": "farey-scan",
    "fixed-class": "fixed-class-scan",
    "snf": "snf",
}
DEFAULT_WINDOW = {"topology": 30, "heegaard": 50, "farey": 100, "fixed-class": 50, "snf": 1}


class ConfigError(ValueError):
    pass


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


# -- config ---------------------------------------------------------------------

def load_config(path: str) -> dict:
    try:
        text = Path(path).read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        if path.endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            data = tomllib.loads(text.decode())
        else:
            data = json.loads(text)
    except (ValueError, UnicodeDecodeError) as e:
        raise ConfigError(f"malformed config {path}: {e}") from e
    _require(isinstance(data, dict), "config must be a mapping")
    return data


def _parse_json_flag(text: str, name: str) -> Any:
    try:
        return json.loads(text)
    except ValueError as e:
        raise ConfigError(f"--{name}: not valid JSON: {e}") from e


def resolve_config(cmd: str, args: argparse.Namespace) -> dict:
    cfg = load_config(args.config) if args.config else {}
    kind = cfg.get("kind", KINDS[cmd])
    _require(kind == KINDS[cmd], f"config kind {kind!r} does not match subcommand {cmd!r}")
    cfg["kind"] = kind

    window = cfg.get("window", {})
    if isinstance(window, int):
        window = {"N": window}
    _require(isinstance(window, dict), "window must be an integer or a mapping")
    window = dict(window)
    if args.window is not None:
        window["N"] = args.window
    if args.rho is not None:
        window["rho"] = args.rho
    window.setdefault("N", DEFAULT_WINDOW[cmd])
    window.setdefault("rho", 0.5)
    _require(isinstance(window["N"], int) and window["N"] >= 1, "window N must be an integer >= 1")
    _require(isinstance(window["rho"], (int, float)) and 0 < window["rho"] < 1,
             "window rho must lie in (0, 1)")
    cfg["window"] = window

    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.setdefault("seed", 0)
    _require(isinstance(cfg["seed"], int) and 0 <= cfg["seed"] < 2**64,
             "seed must be an unsigned 64-bit integer")
    if args.out is not None:
        cfg["out"] = args.out
    if args.format is not None:
        cfg["format"] = args.format
    cfg.setdefault("format", "json")
    _require(cfg["format"] in ("json", "csv", "both"), "format must be json, csv or both")

    for key in EXTRA_FLAGS.get(cmd, {}):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg[key] = _parse_json_flag(val, key) if key in JSON_FLAGS else val
    if "primes" in cfg:
        _require(all(isinstance(p, int) and is_prime(p) for p in cfg["primes"]),
                 "primes must all be prime")
    return cfg


def _window(cfg: dict) -> Window:
    return Window(cfg["window"]["N"], float(cfg["window"]["rho"]))


# -- subsets for topology probes ------------------------------------------------

def _coords(x) -> tuple:
    return x if isinstance(x, tuple) else (x,)


def build_subset(spec: dict, group, parse: Callable) -> SubsetOracle:
    _require(isinstance(spec, dict) and "kind" in spec, "subset needs a kind")
    kind = spec["kind"]
    canon = group.canonical
    if kind == "all":
        return SubsetOracle("all", lambda x: True)
    if kind == "empty":
        return SubsetOracle("empty", lambda x: False)
    if kind in ("cofinite", "finite"):
        pts = frozenset(canon(parse(p)) for p in spec.get("points", []))
        if kind == "finite":
            return SubsetOracle(f"finite{sorted(pts)}", lambda x: canon(x) in pts)
        return SubsetOracle(f"cofinite{sorted(pts)}", lambda x: canon(x) not in pts)
    if kind in ("coordinate_nonzero", "coordinate_nonnegative"):
        i = int(spec.get("index", 0))
        if kind == "coordinate_nonzero":
            return SubsetOracle(f"x[{i}]!=0", lambda x: _coords(x)[i] != 0)
        return SubsetOracle(f"x[{i}]>=0", lambda x: _coords(x)[i] >= 0)
    if kind == "congruence":
        m = int(spec.get("modulus", 2))
        r = int(spec.get("residue", 0))
        _require(m >= 1, "modulus must be positive")
        return SubsetOracle(f"x={r} mod {m}", lambda x: all((v - r) % m == 0 for v in _coords(x)))
    if kind == "not_in_cyclic":
        gen = _coords(parse(spec["element"]))
        _require(any(gen), "not_in_cyclic needs a nonzero element")

        def in_span(x):
            x = _coords(x)
            k = next(i for i, v in enumerate(gen) if v)
            if x[k] % gen[k]:
                return False
            t = x[k] // gen[k]
            return all(a == t * b for a, b in zip(x, gen))

        return SubsetOracle(f"not in <{list(gen)}>", lambda x: not in_span(x))
    raise ConfigError(f"unknown subset kind {kind!r}")


# -- runners --------------------------------------------------------------------

def run_topology(cfg: dict) -> tuple[dict, dict, Optional[str]]:
    name = cfg.setdefault("group", "Z2")
    try:
        G, S = builtin_group(name)
    except (KeyError, ValueError) as e:
        raise ConfigError(f"unknown group {name!r}") from e
    U = build_subset(cfg.setdefault("subset", {"kind": "all"}), G, G.parse)
    rng = SplitMix64(cfg["seed"])
    count = int(cfg.setdefault("samples", 20))
    sample = [G.random_element(rng) for _ in range(count)]
    w = _window(cfg)
    rep = openness_probe(G, U, sample, S, w)
    result = {"openness": rep.to_dict(G.dump)}
    checks = {"non_vacuous": not rep.vacuous}
    if "expect_open" in cfg:
        checks["matches_expectation"] = rep.verdict == bool(cfg["expect_open"])
    if G.is_finite and all(g.order is not None for g in S.generators):
        seed_el = G.random_element(rng)
        col = finite_order_collapse(G, S, seed_el)
        result["collapse"] = {"seed": G.dump(seed_el), "closure_size": len(col.closure),
                              "group_order": len(G.elements), "complete": col.complete}
        checks["collapse_to_whole_group"] = col.complete
    csv_rows = ["g,generator,side,exceptions"] + [
        f"\"{json.dumps(G.dump(e.g))}\",{e.generator},{e.side},\"{' '.join(map(str, sorted(e.exceptions)))}\""
        for e in rep.entries
    ]
    return result, checks, "\n".join(csv_rows) + "\n"


def _class(v, genus: int, what: str) -> tuple[int, ...]:
    _require(isinstance(v, list) and len(v) == 2 * genus, f"{what} must have length {2 * genus}")
    c = tuple(int(x) for x in v)
    _require(is_primitive(c), f"{what} must be primitive")
    return c


def _heegaard_from_cfg(cfg: dict, rng: SplitMix64) -> HeegaardData:
    if "lens" in cfg:
        lens = cfg["lens"]
        p, q = (lens["p"], lens.get("q", 1)) if isinstance(lens, dict) else (lens, 1)
        return lens_space(int(p), int(q))
    if "splitting" in cfg:
        return HeegaardData.from_dict(cfg["splitting"])
    if "random" in cfg:
        r = cfg["random"]
        return random_heegaard(rng, int(r.get("genus", 2)), int(r.get("length", 4)))
    raise ConfigError("heegaard scan needs one of lens, splitting, random")


def run_heegaard(cfg: dict) -> tuple[dict, dict, Optional[str]]:
    rng = SplitMix64(cfg["seed"])
    h = _heegaard_from_cfg(cfg, rng)
    g = h.genus
    c = _class(cfg.setdefault("c", list(unit(g, g + 1))), g, "twist class c")
    side = cfg.setdefault("side", RIGHT)
    _require(side in (LEFT, RIGHT), "side must be left or right")
    primes = cfg.setdefault("primes", [2, 3, 5])
    rep = coset_scan(h, c, _window(cfg), primes, side)
    result = {"splitting": h.to_dict(), **rep.to_dict()}
    return result, dict(rep.checks), rep.to_csv()


def _slope(v, what: str) -> Slope:
    if isinstance(v, str):
        return Slope.parse(v)
    _require(isinstance(v, list) and len(v) == 2, f"{what} must be 'p/q' or [p, q]")
    return Slope.of(int(v[0]), int(v[1]))


def _random_slope(rng: SplitMix64, height: int) -> Slope:
    while True:
        p, q = rng.randint(-height, height), rng.randint(0, height)
        try:
            return Slope.of(p, q)
        except ValueError:
            continue


def run_farey(cfg: dict) -> tuple[dict, dict, Optional[str]]:
    w = _window(cfg)
    if "triples" in cfg:
        triples = [tuple(_slope(s, "slope") for s in t) for t in cfg["triples"]]
    elif all(k in cfg for k in ("a", "b", "c")):
        triples = [(_slope(cfg["a"], "a"), _slope(cfg["b"], "b"), _slope(cfg["c"], "c"))]
    else:
        rng = SplitMix64(cfg["seed"])
        height = int(cfg.setdefault("height", 10))
        triples = [tuple(_random_slope(rng, height) for _ in range(3))
                   for _ in range(int(cfg.setdefault("samples", 50)))]
    scans, checks, rows = [], {"upper_bound": True, "exceptions_in_inner_window": True}, ["a,b,c,n,slope,distance,twisting"]
    for a, b, c in triples:
        s = twist_coset_distance_scan(a, b, c, w)
        d = s.to_dict()
        d["exceptional_bound"] = exceptional_bound(a, b, c)
        if len(triples) > 1:
            del d["rows"]  # the CSV keeps them
        scans.append(d)
        for k, v in s.checks.items():
            checks[k] = checks[k] and v
        rows += [f"{a},{b},{c},{line}" for line in s.to_csv().splitlines()[1:]]
    return {"scans": scans}, checks, "\n".join(rows) + "\n"


def run_fixed_class(cfg: dict) -> tuple[dict, dict, Optional[str]]:
    g = int(cfg.setdefault("genus", 1))
    _require(1 <= g, "genus must be >= 1")
    if "word" in cfg:
        word = TwistWord.from_json(cfg["word"], genus=g)
    else:
        # default: the chain twists T_1 T_2^-1 ... , pseudo-Anosov-like on homology
        chain = chain_curve_classes(g)
        word = TwistWord.of(g, [(x, 1 if i % 2 == 0 else -1) for i, x in enumerate(chain)])
        cfg["word"] = json.loads(word.to_json())
    c = _class(cfg.setdefault("c", list(unit(g, 1))), g, "twist class c")
    scan = fixed_class_coset_scan(word, c, _window(cfg))
    lo, hi = spectral_radius_enclosure(word_to_matrix(word))
    result = {**scan.to_dict(), "spectral_radius": [f"{float(lo):.12g}", f"{float(hi):.12g}"]}
    checks = {"exceptions_in_inner_window": scan.confined}
    csv = "n,fixed_rank\n" + "".join(f"{n},{r}\n" for n, r in sorted(scan.ranks.items()))
    return result, checks, csv


def run_snf(cfg: dict) -> tuple[dict, dict, Optional[str]]:
    _require("matrix" in cfg, "snf needs a matrix")
    m = cfg["matrix"]
    _require(isinstance(m, list) and m and all(isinstance(r, list) for r in m), "matrix must be a list of rows")
    A = IntMatrix(m)
    s = smith_normal_form(A)
    D = s.diagonal_matrix(*A.shape)
    chain = all(s.d[i + 1] % s.d[i] == 0 for i in range(s.rank - 1))
    checks = {
        "factorization": s.U @ A @ s.V == D,
        "divisibility_chain": chain,
        "unimodular": abs(determinant(s.U)) == 1 and abs(determinant(s.V)) == 1,
    }
    result = {"d": list(s.d), "rank": s.rank, "torsion": list(s.torsion),
              "U": s.U.tolist(), "V": s.V.tolist()}
    csv = "i,d\n" + "".join(f"{i},{x}\n" for i, x in enumerate(s.d))
    return result, checks, csv


RUNNERS = {
    "topology": run_topology,
    "heegaard": run_heegaard,
    "farey": run_farey,
    "fixed-class": run_fixed_class,
    "snf": run_snf,
}
EXTRA_FLAGS = {
    "topology": {"group": "group name, see `list`"},
    "heegaard": {"lens": "lens space p (q defaults to 1), or JSON {\"p\":..,\"q\":..}",
                 "side": "left or right"},
    "farey": {"a": "slope p/q", "b": "slope p/q", "c": "slope p/q"},
    "fixed-class": {"genus": "surface genus"},
    "snf": {"matrix": "JSON list of integer rows"},
}
JSON_FLAGS = {"lens", "matrix", "genus"}


# -- catalog --------------------------------------------------------------------

def list_builtins() -> dict:
    groups = []
    for name in BUILTIN_GROUPS:
        G, S = builtin_group(name)
        groups.append({
            "name": name,
            "order": len(G.elements) if G.is_finite else "infinite",
            "generators": [{"element": G.dump(g.element), "order": g.order or "infinite"}
                           for g in S.generators],
            "conjugation_closed": S.conjugation_closed,
        })
    return {
        "version": __version__,
        "groups": groups,
        "disk_systems": {
            str(g): {"a": [list(c) for c in standard_a_system(g).classes],
                     "b": [list(c) for c in standard_b_system(g).classes]}
            for g in range(1, 5)
        },
        "chain_curves": {str(g): [list(c) for c in chain_curve_classes(g)] for g in range(1, 5)},
    }


# -- entry point ----------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"twistlab {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)
    for cmd in RUNNERS:
        sp = sub.add_parser(cmd, help=f"run a {KINDS[cmd]}")
        sp.add_argument("--config", help="JSON or TOML experiment config")
        sp.add_argument("--window", type=int, help="window half-width N")
        sp.add_argument("--rho", type=float, help="inner window fraction")
        sp.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        sp.add_argument("--out", help="report path (JSON); CSV goes next to it")
        sp.add_argument("--format", choices=["json", "csv", "both"])
        for key, help_ in EXTRA_FLAGS[cmd].items():
            sp.add_argument(f"--{key}", help=help_)
    lp = sub.add_parser("list", help="print the built-in catalog")
    lp.add_argument("--out")
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    if args.cmd == "list":
        text = _dumps(list_builtins())
        if args.out:
            _write(Path(args.out), text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    try:
        if args.cmd == "heegaard" and args.lens is not None and args.lens.lstrip("-").isdigit():
            args.lens = json.dumps({"p": int(args.lens), "q": 1})
        cfg = resolve_config(args.cmd, args)
        if cfg["format"] != "json" and not cfg.get("out"):
            raise ConfigError("CSV output needs --out")
        result, checks, csv = RUNNERS[args.cmd](cfg)
    except (ConfigError, ValueError, KeyError, TypeError) as e:
        print(f"twistlab: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID

    ok = all(checks.values())
    report = {
        "tool": "twistlab",
        "version": __version__,
        "config": cfg,
        "result": result,
        "checks": {k: "pass" if v else "fail" for k, v in checks.items()},
        "ok": ok,
    }
    text = _dumps(report)
    out = cfg.get("out")
    if out:
        path = Path(out)
        json_path = path.with_suffix(".json") if path.suffix == ".csv" else path
        _write(json_path, text)
        if cfg["format"] in ("csv", "both") and csv is not None:
            _write(json_path.with_suffix(".csv"), csv)
    else:
        sys.stdout.write(text)
    for k, v in checks.items():
        print(f"{k}: {'pass' if v else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAILED
