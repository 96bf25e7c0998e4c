"""Verification reports: check results, report handlers and the runner that drives the suites."""

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import click

from .errors import CapExceededError, SchemeAxiomError

logger = logging.getLogger(__name__)

SUITES = ("suborbits", "qsrg", "scheme")


def applicable_suites(nu: int, suites=SUITES) -> List[str]:
    """qsrg needs nu >= 2; the scheme exists only at nu = 2."""
    return [s for s in suites if not (s == "qsrg" and nu < 2) and not (s == "scheme" and nu != 2)]


@dataclass
class CheckResult:
    """One pass/fail assertion of a verification suite."""
    suite: str
    name: str
    passed: bool
    expected: Any = None
    observed: Any = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['passed'] = bool(self.passed)
        return data


@dataclass
class VerificationReport:
    q: int
    nu: int
    checks: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    @property
    def discrepancies(self) -> List[Tuple[str, Dict[str, Any]]]:
        """Stated values that differ from computed ones; informational, never a failure."""
        rows = []
        for suite, payload in self.data.items():
            if isinstance(payload, dict):
                for key in ("length_discrepancies", "discrepancies"):
                    rows.extend((suite, row) for row in payload.get(key, []))
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            'q': self.q,
            'nu': self.nu,
            'passed': self.passed,
            'checks': [c.to_dict() for c in self.checks],
            'data': self.data,
            'timing': {'elapsed_seconds': round(self.elapsed_seconds, 3)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)


class ReportHandler:
    """Base class for report sinks."""

    def publish(self, report: VerificationReport) -> bool:
        """Deliver the report. Return True if successful."""
        raise NotImplementedError


class ConsoleReportHandler(ReportHandler):
    """Human summary on the terminal."""

    def publish(self, report: VerificationReport) -> bool:
        click.echo(f"🔍 Verification for q={report.q}, nu={report.nu}")
        for check in report.checks:
            mark = "✅" if check.passed else "❌"
            click.echo(f"{mark} [{check.suite}] {check.name}")
            if not check.passed:
                click.echo(f"    expected: {check.expected}")
                click.echo(f"    observed: {check.observed}")
                if check.detail:
                    click.echo(f"    {check.detail}")
        for suite, row in report.discrepancies:
            click.echo(f"⚠️  [{suite}] stated {row.get('quantity', row.get('label'))}: "
                       f"{row.get('stated', row.get('printed'))}, observed {row.get('observed', row.get('derived'))}")
        total, failed = len(report.checks), len(report.failures)
        if failed:
            click.echo(f"❌ {failed} of {total} checks failed")
        else:
            click.echo(f"✅ All {total} checks passed ({report.elapsed_seconds:.1f}s)")
        return True


class FileReportHandler(ReportHandler):
    """Writes the JSON report to a file."""

    def __init__(self, path: str = "verification_report.json"):
        self.path = path

    def publish(self, report: VerificationReport) -> bool:
        try:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
                fh.write("\n")
            return True
        except OSError as e:
            logger.error("failed to write report to %s: %s", self.path, e)
            return False


class VerificationRunner:
    """Runs the verification suites for one (q, nu) and hands the report to every handler."""

    def __init__(self, config):
        from .geometry import space_new

        self.config = config
        self.space = space_new(config.q, config.nu, config.delta)
        self.handlers: List[ReportHandler] = []
        self._table = None
        self._labels = None

    def add_handler(self, handler: ReportHandler):
        self.handlers.append(handler)

    @property
    def table(self):
        from .lambda_graph import VertexTable

        if self._table is None:
            self._table = VertexTable(self.space, cap=self.config.vertex_cap, seed=self.config.seed)
        return self._table

    @property
    def labels(self):
        from .suborbits import label_table

        if self._labels is None:
            self._labels = label_table(self.space, self.table, self.config.threads)
        return self._labels

    def run(self, suites=SUITES) -> VerificationReport:
        report = VerificationReport(q=self.config.q, nu=self.config.nu)
        start = time.perf_counter()
        for suite in suites:
            logger.info("running suite %s", suite)
            try:
                checks, data = getattr(self, f"_suite_{suite}")()
            except SchemeAxiomError as e:
                checks = [CheckResult(suite, "association-scheme axioms", False, detail=str(e),
                                      observed=e.diagnostics)]
                data = {}
            report.checks.extend(checks)
            report.data[suite] = data
        report.elapsed_seconds = time.perf_counter() - start
        self.dispatch(report)
        return report

    def dispatch(self, report: VerificationReport):
        for handler in self.handlers:
            try:
                handler.publish(report)
            except Exception as e:
                logger.error("report handler %s failed: %s", type(handler).__name__, e)

    def _suite_suborbits(self):
        from .geometry import g01_act, order_gl, order_o
        from .lambda_graph import vertex_count
        from .oracle import cross_validate, cross_validate_alt, g01_generators, group_closure
        from .suborbits import all_labels, classify, length_discrepancies, rank_g0, representative, suborbit_size

        space, config = self.space, self.config
        q, nu = space.q, space.nu
        labels = all_labels(q, nu)
        total = sum(suborbit_size(q, nu, L) for L in labels)
        checks = [
            CheckResult("suborbits", "lengths sum to |Lambda|", total == vertex_count(q, nu),
                        expected=vertex_count(q, nu), observed=total),
            CheckResult("suborbits", "label count equals rank", len(labels) == rank_g0(q, nu),
                        expected=rank_g0(q, nu), observed=len(labels)),
        ]
        data: Dict[str, Any] = {
            'rank': rank_g0(q, nu),
            'lengths': {str(L): suborbit_size(q, nu, L) for L in labels},
            'length_discrepancies': length_discrepancies(q, nu),
        }

        broken = []
        for L in labels:
            rep = representative(space, L)
            label, witness = classify(space, rep)
            if label != L or g01_act(witness, rep) != rep:
                broken.append(str(L))
        checks.append(CheckResult("suborbits", "classify(representative(L)) = L", not broken,
                                  expected=[], observed=broken))

        group_order = order_gl(nu, q) * order_o(2, q)
        if group_order <= config.group_cap:
            closure = group_closure(space, g01_generators(space), config.group_cap)
            checks.append(CheckResult("suborbits", "generators close to G01", len(closure) == group_order,
                                      expected=group_order, observed=len(closure)))
        for i in (1, 2):
            if nu >= i and q ** (nu * (nu - 1) // 2) <= config.alt_cap:
                checks.extend(cross_validate_alt(space, i, config.alt_cap))

        try:
            table = self.table
        except CapExceededError as e:
            data['oracle'] = {'skipped': str(e)}
            return checks, data

        rng_indices = table.rng.integers(0, len(table), size=min(config.samples, len(table)))
        unsound = []
        for i in rng_indices.tolist():
            v = table.vertex(i)
            label, witness = classify(space, v)
            if g01_act(witness, representative(space, label)) != v:
                unsound.append(i)
        checks.append(CheckResult("suborbits", "witnesses carry representatives to vertices", not unsound,
                                  expected=[], observed=unsound))

        oracle_checks, oracle_data = cross_validate(space, table, self.labels, config.vertex_cap, config.threads)
        checks.extend(oracle_checks)
        data['oracle'] = oracle_data
        return checks, data

    def _suite_qsrg(self):
        from .qsrg import census, census_checks

        report = census(self.space, self.table, self.labels, pair_cap=self.config.pair_cap,
                        vertex_cap=self.config.vertex_cap, samples=self.config.samples, seed=self.config.seed)
        return census_checks(self.space, report), report

    def _suite_scheme(self):
        from .scheme import (
            build_scheme,
            compare_with_pair_orbits,
            count_line_stabilizer,
            relation_matrix,
            stabilizer_order_phi1,
            transporter_independence,
            verify_intersection_numbers,
            verify_stabilizer_relations,
        )

        space, config = self.space, self.config
        scheme = build_scheme(space, self.table, self.labels, samples=config.samples, seed=config.seed)
        checks, data = verify_intersection_numbers(space, scheme)
        checks.extend(verify_stabilizer_relations(space))
        counts = {c: count_line_stabilizer(space, c) for c in space.field.omega}
        checks.append(CheckResult("scheme", "line stabilizer has q+1 elements",
                                  all(n == space.q + 1 for n in counts.values()),
                                  expected=space.q + 1, observed=counts))
        checks.append(transporter_independence(space, self.table, samples=50, seed=config.seed))
        if len(self.table) ** 2 <= config.pair_cap:
            rel = relation_matrix(space, self.table, self.labels, config.pair_cap)
            checks.append(compare_with_pair_orbits(space, self.table, rel, config.pair_cap))
        data['scheme'] = scheme.to_json()
        data['stabilizer_order_phi1'] = stabilizer_order_phi1(space.q)
        return checks, data


def run_verification(config, suites=SUITES, handlers: Optional[List[ReportHandler]] = None) -> VerificationReport:
    runner = VerificationRunner(config)
    for handler in handlers or []:
        runner.add_handler(handler)
    return runner.run(suites)

