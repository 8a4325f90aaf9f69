"""Command-line front end.

Every command reads its parameters from flags, optionally backed by an INI
file given with --config (sections [run], [flow], [assemble]); flags win.
Exit status: 0 ok, 2 invalid input, 3 numerical failure, 4 consistency failure.
"""

import argparse
import configparser
import json
import sys

from . import census as cen
from . import critical as crit
from . import flow as fl
from . import morse
from .algebra import default_order, format_poly, parse_poly
from .curve import CurveContext
from .errors import HiggsError, ValidationError
from .groups import parse_group

COMMANDS = ("enumerate", "index", "assemble", "census", "dwww", "flow", "check")

# (flag dest, config section, type, default)
OPTIONS = {
    "group": ("run", str, None),
    "n": ("run", int, None),
    "p": ("run", int, None),
    "q": ("run", int, None),
    "genus": ("run", int, None),
    "degree": ("run", int, None),
    "toledo": ("run", str, None),
    "trunc": ("run", int, None),
    "out": ("run", str, None),
    "format": ("run", str, None),
    "chains": ("run", bool, False),
    "size": ("flow", int, 16),
    "rank": ("flow", int, 2),
    "seed": ("flow", int, 0),
    "tol": ("flow", float, fl.DEFAULT_TOL),
    "max_steps": ("flow", int, 20000),
    "spacing": ("flow", float, 1.0),
    "amplitude": ("flow", float, 0.3),
    "figure": ("flow", str, None),
    "state_out": ("flow", str, None),
    "n0": ("assemble", str, None),
}


def build_parser():
    p = argparse.ArgumentParser(prog="higgsmorse", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config")
        sp.add_argument("--group")
        for flag in ("n", "p", "q", "genus", "degree", "trunc"):
            sp.add_argument(f"--{flag}", type=int)
        sp.add_argument("--toledo")
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "records", "json-lines"))
        sp.add_argument("--chains", action="store_true", default=None,
                        help="also list the non-minimal Sp Hodge chains")
        sp.add_argument("--size", type=int)
        sp.add_argument("--rank", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--max-steps", dest="max_steps", type=int)
        sp.add_argument("--spacing", type=float)
        sp.add_argument("--amplitude", type=float)
        sp.add_argument("--figure", "--plot", dest="figure", help="PNG path for the energy trace")
        sp.add_argument("--state-out", dest="state_out")
        sp.add_argument("--n0", help="Poincare polynomial of the phi = 0 stratum")
    return p


def resolve(args):
    """Merge flags over the config file over built-in defaults."""
    cfg = configparser.ConfigParser()
    if args.config:
        if not cfg.read(args.config, encoding="utf-8"):
            raise ValidationError(f"cannot read config file {args.config}")
    out = {"command": args.command}
    for key, (section, typ, default) in OPTIONS.items():
        val = getattr(args, key, None)
        if val is None and cfg.has_option(section, key.replace("_", "-")):
            val = cfg.get(section, key.replace("_", "-"))
        elif val is None and cfg.has_option(section, key):
            val = cfg.get(section, key)
        if val is None:
            out[key] = default
            continue
        try:
            if typ is bool and isinstance(val, str):
                out[key] = val.strip().lower() in ("1", "true", "yes", "on")
            else:
                out[key] = typ(val)
        except ValueError:
            raise ValidationError(f"bad value {val!r} for {key}") from None
    return out


def _need(cfg, *keys):
    for k in keys:
        if cfg[k] is None:
            raise ValidationError(f"missing --{k.replace('_', '-')}")


def _group(cfg):
    _need(cfg, "group")
    return parse_group(cfg["group"], n=cfg["n"], p=cfg["p"], q=cfg["q"])


def _degree(cfg, grp):
    if cfg["toledo"] is not None:
        return cen.resolve_toledo(cfg["toledo"], grp.n, cfg["genus"])
    _need(cfg, "degree")
    return cfg["degree"]


def _strata(cfg):
    grp = _group(cfg)
    _need(cfg, "genus")
    g = cfg["genus"]
    d = _degree(cfg, grp)
    if grp.family == "gl" and grp.n == 2:
        return grp, enumerate_sorted(crit.enumerate_gl2_critical(g, d))
    if grp.family == "gl" and grp.n == 3:
        return grp, enumerate_sorted(crit.enumerate_gl3_critical(g, d))
    if grp.family == "sp":
        strata = crit.enumerate_sp2nR_minima(grp.n, g, d)
        if cfg["chains"]:
            strata += crit.enumerate_sp2nR_chains(grp.n, g, d)
        return grp, strata
    raise ValidationError(f"no critical-point enumeration for {grp.name}")


def enumerate_sorted(strata):
    return sorted(strata, key=lambda s: (s.is_phi_zero is False, s.sort_key))


def _emit(cfg, rows, header=None, records=None):
    fmt = cfg["format"]
    if fmt == "records" and records is not None:
        text = "\n".join(records) + "\n"
    elif fmt == "json-lines":
        text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)
    else:
        import csv
        import io
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=header or list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v)
                        for k, v in r.items()})
        text = buf.getvalue()
    _write(cfg, text)


def _write(cfg, text):
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(cfg, with_index=False):
    cfg["format"] = cfg["format"] or "records"
    grp, strata = _strata(cfg)
    ctx = CurveContext(cfg["genus"])
    rows, records = [], []
    for i, st in enumerate(strata):
        extra = []
        row = crit.stratum_to_dict(st)
        if with_index:
            rep = morse.morse_index(st.hodge, ctx)
            mini = morse.is_local_minimum(st.hodge, ctx)
            idx = rep.index if rep.resolved else "UNRESOLVED"
            extra = [("morse_index", idx), ("index_lower", rep.lower),
                     ("index_upper", rep.upper if rep.upper is not None else "unbounded"),
                     ("local_minimum", str(bool(mini)).lower())]
            row.update({k: v for k, v in extra})
        rows.append(row)
        records.append(crit.format_stratum_record(st, index=i, extra=extra))
    _emit(cfg, rows, records=records)


def cmd_assemble(cfg):
    _need(cfg, "genus", "degree")
    grp = _group(cfg) if cfg["group"] else parse_group("gl(2)")
    if not (grp.family == "gl" and grp.n == 2):
        raise ValidationError("assembly is implemented for gl(2)")
    if cfg["n0"] is None:
        raise ValidationError("missing --n0: the phi = 0 stratum polynomial is an external input")
    n0 = parse_poly(cfg["n0"])
    ctx = CurveContext(cfg["genus"])
    terms = morse.gl2_assembly_terms(cfg["genus"], cfg["degree"], n0, ctx)
    total = morse.poincare_assemble(terms)
    cfg["format"] = cfg["format"] or "csv"
    rows = [{"index": i, "polynomial": format_poly(p)} for i, p in terms]
    rows.append({"index": "total", "polynomial": format_poly(total)})
    _emit(cfg, rows, header=["index", "polynomial"])


def cmd_census(cfg):
    grp = _group(cfg)
    if grp.family != "sp":
        raise ValidationError("component census is implemented for sp(2n,R)")
    _need(cfg, "genus")
    if cfg["toledo"] is None and cfg["degree"] is None:
        raise ValidationError("missing --toledo")
    d = cen.resolve_toledo(cfg["toledo"] if cfg["toledo"] is not None else cfg["degree"],
                           grp.n, cfg["genus"])
    rep = cen.census(grp.n, cfg["genus"], d)
    cfg["format"] = cfg["format"] or "csv"
    if cfg["format"] == "csv":
        _write(cfg, cen.report_to_csv(rep))
        return
    rows = [{"group": rep.group.name, "g": rep.genus, "d": rep.toledo, "label": l,
             "count": str(c), "provenance": p} for l, c, p in rep.breakdown]
    rows.append({"group": rep.group.name, "g": rep.genus, "d": rep.toledo, "label": "total",
                 "count": str(rep.total), "provenance": ""})
    _emit(cfg, rows)


def cmd_dwww(cfg):
    _need(cfg, "genus", "degree")
    ctx = CurveContext(cfg["genus"]).require_moduli()
    order = cfg["trunc"] if cfg["trunc"] is not None else default_order(4 * cfg["genus"])
    rows = []
    for l in morse.admissible_l(cfg["genus"], cfg["degree"]):
        r = morse.dwww_difference(l, cfg["degree"], ctx, order)
        rows.append({"l": l, "shift": r.shift,
                     "first": format_poly(r.first.to_polynomial()),
                     "second": format_poly(r.second.to_polynomial()),
                     "difference": format_poly(r.difference.to_polynomial()),
                     "order": order})
    if not rows:
        raise ValidationError("no admissible l for this genus and degree")
    cfg["format"] = cfg["format"] or "csv"
    _emit(cfg, rows)


_FLOW_TAGS = {"gl": "gl", "sl": "sl", "slr": "slr", "sp": "sp"}


def cmd_flow(cfg):
    tag = "gl"
    rank = cfg["rank"]
    if cfg["group"]:
        grp = parse_group(cfg["group"], n=cfg["n"] or (rank if "n" in cfg["group"] else None))
        tag = _FLOW_TAGS.get(grp.family)
        if tag is None:
            raise ValidationError(f"no lattice flow for {grp.name}")
        rank = 2 * grp.n if grp.family == "sp" else grp.n
    state = fl.random_state(cfg["size"], rank, cfg["seed"], spacing=cfg["spacing"],
                            amplitude=cfg["amplitude"], group_tag=tag)
    try:
        trace = fl.heat_flow_run(state, cfg["tol"], cfg["max_steps"])
    except HiggsError as err:
        dump = getattr(err, "state_dump", None)
        if dump and cfg["state_out"]:
            with open(cfg["state_out"], "w", encoding="utf-8", newline="\n") as fh:
                fh.write(dump)
        raise
    cfg["format"] = cfg["format"] or "csv"
    if cfg["format"] == "csv":
        _write(cfg, trace.to_csv())
    else:
        rows = [dict(zip(("time", "energy", "gradient_norm", "step"), map(float, r)))
                for r in trace.steps]
        _emit(cfg, rows)
    if cfg["state_out"]:
        with open(cfg["state_out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(fl.state_to_text(trace.final_state))
    if cfg["figure"]:
        from .report import plot_energy_trace
        plot_energy_trace(trace, cfg["figure"], title=f"rank {rank}, {cfg['size']}x{cfg['size']}")
    lim = trace.limit_report
    clusters = ", ".join(f"{c.value:.3e} x{c.multiplicity}" for c in lim.clusters)
    status = "converged" if trace.converged else "max_steps reached"
    print(f"flow: {status}; limit clusters ({lim.status}): {clusters}", file=sys.stderr)


def cmd_check(cfg):
    _need(cfg, "genus")
    grp = parse_group(cfg["group"], n=cfg["n"]) if cfg["group"] else None
    n = grp.n if grp is not None else cfg["n"]
    if n is None:
        raise ValidationError("missing --n")
    lo, hi = cen.milnor_wood(n, cfg["genus"])
    total, table = cen.hitchin_base_dim(n, cfg["genus"])
    rows = [{"quantity": "milnor_wood", "value": f"[{lo}, {hi}]"}]
    rows += [{"quantity": f"h0(K^{p})", "value": h} for p, h in table]
    rows.append({"quantity": "hitchin_base_dim", "value": total})
    cfg["format"] = cfg["format"] or "csv"
    _emit(cfg, rows, header=["quantity", "value"])


HANDLERS = {
    "enumerate": cmd_enumerate,
    "index": lambda cfg: cmd_enumerate(cfg, with_index=True),
    "assemble": cmd_assemble,
    "census": cmd_census,
    "dwww": cmd_dwww,
    "flow": cmd_flow,
    "check": cmd_check,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        HANDLERS[cfg["command"]](cfg)
    except HiggsError as err:
        msg = " ".join(str(err).split())
        print(f"error: {type(err).__name__}: {msg}", file=sys.stderr)
        return err.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
