"""Command-line front end: ``rees-kit <command> [options]``.

Every command builds a RunReport (a JSON document validated against
``data/run_report.schema.json``), prints a short human summary and, with
``--json PATH``, writes the report (``--json -`` prints it instead).

Exit codes: 0 success, 1 validation failure, 2 I/O or parse error,
3 mathematical mismatch, 4 timeout, 5 unsupported subcase.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from importlib import resources
from pathlib import Path

from . import __version__
from .groebner import Ideal
from .ideals import gs_check, min_prime_check, minor_ideal, height_in_base
from .instances import (Instance, bundled, bundled_names, load_instance, random_instance,
                        random_suite_specs)
from .pencil import InvalidSetting, NeedsFieldExtension
from .rees import (FRAMES, FrameMismatch, MethodMismatch, NormalizationFailed, NotNormalized,
                   ReesError, ReesProblem, UnsupportedSubcase, ValidationError, jacobian_dual,
                   symmetric_ideal, validate_setting)
from .ring import Field, ParseError, PolyMatrix, RingError, format_poly, parse_poly

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_MISMATCH, EXIT_TIMEOUT, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4, 5
SCHEMA_ID = "rees-kit/run-report/1"

_VERDICT_EXIT = {"PASS": EXIT_OK, "INVALID": EXIT_INVALID, "ERROR": EXIT_IO,
                 "FAIL": EXIT_MISMATCH, "TIMEOUT": EXIT_TIMEOUT, "FLAGGED": EXIT_UNSUPPORTED}
# Worst verdict wins when several instances are aggregated.
_SEVERITY = ["PASS", "FLAGGED", "INVALID", "FAIL", "TIMEOUT", "ERROR"]


class Timeout(Exception):
    pass


@contextmanager
def deadline(seconds: float | None):
    """Raise Timeout inside the block after ``seconds`` (main thread only)."""
    if not seconds:
        yield
        return

    def fire(signum, frame):
        raise Timeout(f"exceeded {seconds} s")

    previous = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous)


def schema() -> dict:
    text = (resources.files("rees_kit") / "data" / "run_report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_report(report: dict):
    """Raise jsonschema.ValidationError if ``report`` does not match the shipped schema."""
    import jsonschema
    jsonschema.validate(report, schema())


def ideal_strings(I: Ideal) -> list:
    """Reduced Groebner basis, monic, in descending leading-monomial order."""
    return [format_poly(g) for g in I.gb().elements]


# --------------------------------------------------------------------------
# per-instance reports
# --------------------------------------------------------------------------

class _Run:
    """Collects one instance's report while stages execute."""

    def __init__(self, inst: Instance, timings: bool):
        self.inst = inst
        self.report = {"id": inst.id, "field": str(inst.ring.field), "order": inst.ring.order.kind,
                       "n": inst.n, "verdict": "PASS", "checks": {}, "flags": []}
        self._timings = {} if timings else None

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            if self._timings is not None:
                self._timings[name] = round(time.perf_counter() - start, 4)

    def check(self, name: str, fn):
        """Record fn() -> bool (or (bool, detail)) as PASS/FAIL; unsupported cases are FLAGGED."""
        entry: dict
        try:
            with self.stage(name):
                out = fn()
            ok, detail = out if isinstance(out, tuple) else (out, None)
            entry = {"status": "PASS" if ok else "FAIL"}
            if detail is not None:
                entry["detail"] = detail
        except UnsupportedSubcase as exc:
            entry = {"status": "FLAGGED", "detail": str(exc)}
        except MethodMismatch as exc:
            entry = {"status": "FAIL", "detail": str(exc)}
            if exc.witness is not None:
                entry["witness"] = format_poly(exc.witness)
        self.report["checks"][name] = entry
        return entry["status"]

    def finish(self, verdict: str | None = None) -> dict:
        rep = self.report
        if verdict is None:
            statuses = [c["status"] for c in rep["checks"].values()]
            verdict = "PASS"
            if "FLAGGED" in statuses:
                verdict = "FLAGGED"
            if "FAIL" in statuses:
                verdict = "FAIL"
        rep["verdict"] = verdict
        if self._timings is not None:
            rep["timings"] = dict(self._timings)
        return rep


def _setting_section(run: _Run, phi: PolyMatrix) -> bool:
    with run.stage("validate"):
        setting = validate_setting(phi)
    run.report["setting"] = setting.to_dict()
    for name, ok in setting.checks.items():
        run.report["checks"][f"setting.{name}"] = {"status": "PASS" if ok else "FAIL"}
    return setting.ok


def _classify_section(run: _Run, prob: ReesProblem):
    with run.stage("classify"):
        run.report["case"] = prob.case.to_dict()
        run.report["pencil"] = prob.pencil.to_dict(prob.ring.field)
        run.report["branch"] = prob.branch


def _expected_checks(run: _Run, prob: ReesProblem):
    """Compare against the instance file's ``expected`` section, when present."""
    exp = run.inst.expected
    ring = prob.ring

    def parse_all(items):
        return [parse_poly(s, ring) for s in items]

    if "case" in exp:
        run.check("expected.case", lambda: prob.case.case == exp["case"])
    if "J_extra" in exp:
        run.check("expected.J", lambda: Ideal(ring, prob.forms[:-1] + parse_all(exp["J_extra"]))
                  .equals(prob.J))
    if "alphas" in exp:
        run.check("expected.alphas", lambda: parse_all(exp["alphas"]) == prob.alpha.alphas)
    if "K2_extra" in exp:
        run.check("expected.K2", lambda: Ideal(ring, prob.J.generators + parse_all(exp["K2_extra"]))
                  .equals(prob.K2_oracle))
    if "Kprime_extra" in exp:
        run.check("expected.Kprime", lambda: Ideal(
            ring, prob.J.generators + parse_all(exp["Kprime_extra"])).equals(prob.Kprime_oracle))
    if "B" in exp:
        run.check("expected.B", lambda: PolyMatrix.from_dict(exp["B"], ring) == prob.B.matrix)
    if "I3" in exp:
        run.check("expected.I3", lambda: Ideal(ring, parse_all(exp["I3"])).equals(prob.I3_B))
    if "saturation_exponent" in exp:
        def exponent():
            prob.A_saturation
            return (prob.saturation_exponent == exp["saturation_exponent"],
                    {"computed": prob.saturation_exponent})

        run.check("expected.saturation_exponent", exponent)


def _defining_section(run: _Run, prob: ReesProblem, method: str):
    ideals = run.report.setdefault("ideals", {})
    if method in ("saturation", "both"):
        with run.stage("saturation"):
            ideals["A_saturation"] = ideal_strings(prob.A_saturation)
        run.report["saturation_exponent"] = prob.saturation_exponent
    if method in ("formula", "both"):
        status = run.check("formula", lambda: prob.A_formula is not None)
        if status == "PASS":
            ideals["A_formula"] = ideal_strings(prob.A_formula)
    if method == "both" and "A_formula" in ideals:
        run.check("defining_ideal.formula_eq_saturation",
                  lambda: prob.defining_ideal("both") is not None)
    if prob.row_transform is not None:
        best = prob.A_saturation if method != "formula" else prob.A_formula
        ideals["A_input_coordinates"] = ideal_strings(prob.to_input_coordinates(best))


def _verify_sections(run: _Run, prob: ReesProblem):
    ideals = run.report.setdefault("ideals", {})
    case = prob.case.case
    with run.stage("J"):
        ideals["J"] = ideal_strings(prob.J)
    if case == "I":
        with run.stage("K"):
            ideals["K"] = ideal_strings(prob.K)
        if run.check("K2.formula_eq_oracle", lambda: prob.symbolic_square_K("formula") is not None) \
                == "PASS":
            ideals["K2"] = ideal_strings(prob.K2_formula)
    elif case == "II":
        with run.stage("K"):
            ideals["K"] = ideal_strings(prob.K)
        if run.check("Kprime.formula_eq_oracle", lambda: prob.ideal_Kprime("formula") is not None) \
                == "PASS":
            ideals["Kprime"] = ideal_strings(prob.Kprime_formula)
    else:
        if run.check("Kdoubleprime.colon_closed", lambda: prob.Kdoubleprime is not None) == "PASS":
            ideals["Kdoubleprime"] = ideal_strings(prob.Kdoubleprime)
    with run.stage("I3"):
        ideals["I3_B"] = ideal_strings(prob.I3_B)
    _defining_section(run, prob, "both")

    def obs():
        c = prob.verify_obs_colon()
        return c.holds and c.exponent_ok, c.to_dict()

    run.check("colon_observation", obs)

    def gs():
        phi = prob.phi
        g2, g3 = gs_check(phi, 2), gs_check(phi, 3)
        ht = height_in_base(phi, minor_ideal(phi, phi.rows - 2))
        mp = min_prime_check(phi)
        detail = {"G2": g2, "G3": g3, "height_I_n_minus_2": ht, "min_prime_xy": mp}
        return g2 and ht == 2 and mp, detail

    run.check("gs_calibration", gs)
    _expected_checks(run, prob)


def run_instance(inst: Instance, command: str = "verify", method: str = "both",
                 frame: str | None = None, timings: bool = False,
                 timeout: float | None = None) -> dict:
    """The RunReport entry for one instance under one command."""
    run = _Run(inst, timings)
    try:
        with deadline(timeout):
            valid = _setting_section(run, inst.phi)
            if command == "validate":
                return run.finish("PASS" if valid else "INVALID")
            if not valid:
                return run.finish("INVALID")
            run.report["ideals"] = {"L": ideal_strings(symmetric_ideal(inst.phi))}
            prob = ReesProblem(inst.phi)
            if prob.row_transform is not None:
                fld = prob.ring.field
                run.report["normalization"] = {
                    "matrix": prob.phi.to_dict(),
                    "row_transform": [[fld.to_str(c) for c in r] for r in prob.row_transform]}
            if command in ("classify", "pencil", "sym", "jdual"):
                _classify_section(run, prob)
                if command == "jdual":
                    run.report["jacobian_dual"] = _jdual_section(prob, frame)
                return run.finish()
            _classify_section(run, prob)
            if command == "defining":
                _defining_section(run, prob, method)
            else:
                _verify_sections(run, prob)
            run.report["flags"] = list(prob.flags)
            return run.finish()
    except Timeout as exc:
        run.report["error"] = str(exc)
        return run.finish("TIMEOUT")
    except (ValidationError, NormalizationFailed, NotNormalized, InvalidSetting,
            NeedsFieldExtension, FrameMismatch) as exc:
        run.report["error"] = f"{type(exc).__name__}: {exc}"
        return run.finish("INVALID")
    except UnsupportedSubcase as exc:
        run.report["error"] = f"UnsupportedSubcase: {exc}"
        return run.finish("FLAGGED")
    except ReesError as exc:
        run.report["error"] = f"{type(exc).__name__}: {exc}"
        return run.finish("FAIL")


def _jdual_section(prob: ReesProblem, frame: str | None) -> dict:
    out = {"phi": jacobian_dual(prob.phi, frame or prob.frame).to_dict()}
    if frame is None:
        out["phi_second"] = prob.Bpp.to_dict()
    return out


# --------------------------------------------------------------------------
# instance sources and the worker pool
# --------------------------------------------------------------------------

def _load(source: tuple, fld: Field | None, order: str | None) -> Instance:
    kind = source[0]
    if kind == "bundled":
        inst = bundled(source[1])
    elif kind == "file":
        inst = load_instance(source[1])
    else:
        _, branch, n, seed = source
        inst = random_instance(branch, n, seed, fld)
    if fld is not None or order is not None:
        inst = inst.with_field(fld, order)
    return inst


def _worker(job: tuple) -> dict:
    source, fld_text, order, opts = job
    fld = Field.parse(fld_text) if fld_text else None
    try:
        inst = _load(source, fld, order)
    except Exception as exc:  # generator exhaustion or a bad file inside a suite
        ident = source[1] if source[0] != "random" else f"rand-{source[1]}-n{source[2]}-s{source[3]}"
        return {"id": str(ident), "field": fld_text or "q", "order": order or "degrevlex",
                "n": 0, "verdict": "ERROR", "checks": {}, "flags": [],
                "error": f"{type(exc).__name__}: {exc}"}
    return run_instance(inst, **opts)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("REES_KIT_THREADS", "1")))
    except ValueError:
        return 1


def run_jobs(jobs: list) -> list:
    """Run jobs serially or in a process pool; results sorted by instance id."""
    workers = min(worker_count(), len(jobs)) if jobs else 1
    if workers <= 1:
        results = [_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs))
    return sorted(results, key=lambda r: r["id"])


def aggregate(command: str, options: dict, instances: list) -> dict:
    verdict = "PASS"
    for rep in instances:
        if _SEVERITY.index(rep["verdict"]) > _SEVERITY.index(verdict):
            verdict = rep["verdict"]
    counts = {v: sum(r["verdict"] == v for r in instances) for v in _SEVERITY}
    return {"schema": SCHEMA_ID, "tool": "rees-kit", "version": __version__, "command": command,
            "options": options, "instances": instances,
            "summary": {k: v for k, v in counts.items() if v}, "verdict": verdict,
            "exit_code": _VERDICT_EXIT[verdict]}


# --------------------------------------------------------------------------
# printing
# --------------------------------------------------------------------------

def _print_human(report: dict, command: str, out=None):
    out = out or sys.stdout
    for rep in report["instances"]:
        head = f"{rep['id']}: {rep['verdict']}"
        if "branch" in rep:
            head += f" [{rep['branch']}]"
        print(head, file=out)
        if "error" in rep:
            print(f"  error: {rep['error']}", file=out)
        if command == "pencil" and "pencil" in rep:
            print("  " + json.dumps(rep["pencil"], sort_keys=True), file=out)
        if command == "sym":
            for g in rep["ideals"]["L"] or []:
                print(f"  {g}", file=out)
        if command == "jdual" and "jacobian_dual" in rep:
            jd = rep["jacobian_dual"]["phi"]
            print(f"  frame {jd['frame']}", file=out)
            m = jd["matrix"]
            for i in range(m["rows"]):
                print("  [" + ", ".join(m["entries"][i * m["cols"]:(i + 1) * m["cols"]]) + "]",
                      file=out)
        if command == "defining":
            for key in ("A_formula", "A_saturation"):
                if key in rep.get("ideals", {}):
                    print(f"  {key}:", file=out)
                    for g in rep["ideals"][key]:
                        print(f"    {g}", file=out)
        for name, c in rep["checks"].items():
            if command in ("validate", "verify", "defining", "suite") or c["status"] != "PASS":
                line = f"  {name}: {c['status']}"
                if c.get("witness"):
                    line += f" (witness {c['witness']})"
                print(line, file=out)
    if len(report["instances"]) != 1:
        print(f"suite: {report['verdict']} {report['summary']}", file=out)


def _emit(report: dict, args) -> int:
    validate_report(report)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.json == "-":
        sys.stdout.write(text)
    else:
        _print_human(report, report["command"])
        if args.json:
            try:
                Path(args.json).write_text(text, encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot write {args.json}: {exc}", file=sys.stderr)
                return EXIT_IO
    return report["exit_code"]


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--field", default=None, help="q (rationals, default) or gf:p")
    p.add_argument("--order", default=None, choices=["degrevlex", "lex"])
    p.add_argument("--timeout", type=float, default=None, help="seconds per instance (exit 4)")
    p.add_argument("--json", metavar="OUT", default=None, help="write the report; '-' prints it")
    p.add_argument("--timings", action="store_true", help="include per-stage wall-clock seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rees-kit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rees-kit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "validate": "check the standing hypotheses on the matrix",
        "classify": "case label, pencil summary and branch",
        "pencil": "Kronecker invariants of the linear part",
        "sym": "generators of the symmetric-algebra ideal",
        "jdual": "Jacobian dual matrices",
        "defining": "defining ideal of the Rees algebra",
        "verify": "every formula against its oracle, plus expected values",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("path", help="instance JSON file, or bundled:NAME")
        _common(p)
        if name == "defining":
            p.add_argument("--method", default="both", choices=["formula", "saturation", "both"])
        if name == "jdual":
            p.add_argument("--frame", default=None, choices=sorted(FRAMES))
    p = sub.add_parser("suite", help="bundled corpus, a directory and seeded random instances")
    p.add_argument("dir", nargs="?", default=None, help="extra directory of instance files")
    p.add_argument("--random", type=int, default=0, metavar="K")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-bundled", action="store_true")
    _common(p)
    return parser


def _single_source(path: str) -> tuple:
    if path.startswith("bundled:"):
        name = path.split(":", 1)[1]
        if name not in bundled_names():
            raise FileNotFoundError(f"no bundled instance {name!r}; choose from {bundled_names()}")
        return ("bundled", name)
    if not Path(path).is_file():
        raise FileNotFoundError(f"cannot read instance file {path}")
    return ("file", path)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        fld = Field.parse(args.field) if args.field else None
    except RingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    opts = {"timings": args.timings, "timeout": args.timeout}
    options = {"field": args.field or "q", "order": args.order or "degrevlex",
               "timeout": args.timeout}

    if args.command == "suite":
        sources = [] if args.no_bundled else [("bundled", nm) for nm in bundled_names()]
        if args.dir:
            folder = Path(args.dir)
            if not folder.is_dir():
                print(f"error: {folder} is not a directory", file=sys.stderr)
                return EXIT_IO
            sources += [("file", str(p)) for p in sorted(folder.glob("*.json"))]
        sources += [("random", b, n, s) for b, n, s in random_suite_specs(args.random, args.seed)]
        options.update({"random": args.random, "seed": args.seed})
        jobs = [(src, args.field, args.order, dict(opts, command="verify")) for src in sources]
        return _emit(aggregate("suite", options, run_jobs(jobs)), args)

    try:
        source = _single_source(args.path)
        inst = _load(source, fld, args.order)
    except (OSError, json.JSONDecodeError, KeyError, ParseError, RingError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.command == "defining":
        opts["method"] = options["method"] = args.method
    if args.command == "jdual":
        opts["frame"] = options["frame"] = args.frame
    report = run_instance(inst, args.command, **opts)
    return _emit(aggregate(args.command, options, [report]), args)


if __name__ == "__main__":
    sys.exit(main())
