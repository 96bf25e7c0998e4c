"""Quasi-strongly-regular parameters of Lambda and the common-neighbour census that checks them."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from .errors import CapExceededError, GeometryError
from .geometry import OrthoSpace, g0_act
from .lambda_graph import VertexTable, adjacent, basepoint, build_graph, joint_dim, neighbors, vertex_count
from .reports import CheckResult
from .suborbits import SuborbitLabel, all_labels, classify, representative, suborbit_size

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QsrgParams:
    n: int
    k: int
    lambda_: int
    c_values: Tuple[int, ...]

    def to_dict(self):
        return {'n': self.n, 'k': self.k, 'lambda': self.lambda_, 'c_values': list(self.c_values)}


def qsrg_params(q: int, nu: int) -> QsrgParams:
    """The parameters as originally stated; the census reports where Lambda departs from them."""
    if nu < 2:
        raise GeometryError(f"Lambda is quasi-strongly regular for nu >= 2, got nu={nu}")
    return QsrgParams(
        n=vertex_count(q, nu),
        k=(q ** nu - 1) * (q + 1),
        lambda_=q ** nu + q * q - q - 1,
        c_values=(0, q * q, q * q - 1, q * q + q),
    )


def derived_lambda(q: int) -> int:
    """An edge lies on one line of q^2 + 1 points; its two ends and the point nearest P0 are not common neighbours."""
    return q * q - 2


def derived_mu_by_label(q: int, nu: int) -> Dict[str, int]:
    """mu(P1, representative) on the codimension-2 suborbits, measured at nu = 2."""
    if nu != 2:
        raise GeometryError(f"the codimension-2 mu table is known for nu = 2, got nu={nu}")
    by_family = {1: 0, 3: q, 4: q + 1, 7: q + 1}
    return {str(L): by_family[L.family] for L in all_labels(q, nu) if L.family in by_family}


def stated_discrepancies(params: Dict, observed: Dict) -> List[Dict[str, object]]:
    """Stated degree, lambda and c values next to what the census measured, where they differ."""
    rows = []
    degrees, lambdas, mus = sorted(observed['degree']), sorted(observed['lambda_hist']), sorted(observed['mu_hist'])
    if degrees != [params['k']]:
        rows.append({'quantity': 'k', 'stated': params['k'], 'observed': degrees})
    if lambdas != [params['lambda']]:
        rows.append({'quantity': 'lambda', 'stated': params['lambda'], 'observed': lambdas})
    if set(mus) != set(params['c_values']):
        rows.append({'quantity': 'c_values', 'stated': sorted(params['c_values']), 'observed': mus})
    return rows


def mu(space: OrthoSpace, u, v) -> int:
    """|Lambda(u) & Lambda(v)|."""
    return len(set(neighbors(space, u)) & set(neighbors(space, v)))


def _histogram(values) -> Dict[int, int]:
    counts = pd.Series(values, dtype="int64").value_counts().sort_index()
    return {int(k): int(c) for k, c in counts.items()}


def _codim2_labels(space: OrthoSpace) -> List[SuborbitLabel]:
    p1 = basepoint(space)
    return [L for L in all_labels(space.q, space.nu)
            if joint_dim(space, p1, representative(space, L)) == space.nu + 2]


def _exhaustive(space: OrthoSpace, table: VertexTable, labels: Optional[List[SuborbitLabel]]) -> Dict:
    G = build_graph(space, table)
    A = nx.to_numpy_array(G, nodelist=range(len(table)), dtype=np.int64)
    common = A @ A
    iu = np.triu_indices(len(table), 1)
    adjacent_pairs = A[iu] == 1
    pair_common = common[iu]

    mu_by_label = {str(L): int(common[0, table.index_of(representative(space, L))]) for L in _codim2_labels(space)}
    observed = {
        'degree': _histogram(A.sum(axis=1)),
        'lambda_hist': _histogram(pair_common[adjacent_pairs]),
        'mu_hist': _histogram(pair_common[~adjacent_pairs]),
        'mu_by_label': mu_by_label,
    }
    extra = {}
    if labels is not None:
        frame = pd.DataFrame({'label': [str(L) for L in labels], 'mu': common[0]})
        spread = frame.groupby('label')['mu'].nunique()
        extra['suborbit_mu_spread'] = {k: int(v) for k, v in spread.items()}
    return {'observed': observed, **extra}


def _per_label(space: OrthoSpace) -> Dict:
    q, nu, n = space.q, space.nu, vertex_count(space.q, space.nu)
    p1 = basepoint(space)
    base = set(neighbors(space, p1))
    lambda_pairs, mu_pairs, mu_by_label = {}, {}, {}
    codim2 = set(_codim2_labels(space))
    for L in all_labels(q, nu):
        if L.family == 0:
            continue
        rep = representative(space, L)
        value = len(base & set(neighbors(space, rep)))
        bucket = lambda_pairs if adjacent(space, p1, rep) else mu_pairs
        # ordered pairs; a suborbit and its paired suborbit share one value
        bucket[value] = bucket.get(value, 0) + n * suborbit_size(q, nu, L)
        if L in codim2:
            mu_by_label[str(L)] = value
    observed = {
        'degree': {len(base): n},
        'lambda_hist': {k: c // 2 for k, c in sorted(lambda_pairs.items())},
        'mu_hist': {k: c // 2 for k, c in sorted(mu_pairs.items())},
        'mu_by_label': mu_by_label,
    }
    return {'observed': observed}


def _sample_pairs(space: OrthoSpace, table: VertexTable, samples: int, seed: int) -> List[Dict]:
    """Raw pairs (u, v): mu(u, v) must equal mu(P1, representative of the label of the transported v)."""
    from .scheme import transporter_to_basepoint

    rng = np.random.default_rng(seed)
    p1_neighbors = set(neighbors(space, basepoint(space)))
    cache: Dict[SuborbitLabel, int] = {}
    mismatches = []
    for _ in range(samples):
        i, j = (int(x) for x in rng.integers(0, len(table), size=2))
        if i == j:
            continue
        u, v = table.vertex(i), table.vertex(j)
        label = classify(space, g0_act(transporter_to_basepoint(space, u), v))[0]
        if label not in cache:
            cache[label] = len(p1_neighbors & set(neighbors(space, representative(space, label))))
        observed = mu(space, u, v)
        if observed != cache[label]:
            mismatches.append({'pair': [i, j], 'label': str(label), 'mu': observed, 'expected': cache[label]})
    return mismatches


def census(space: OrthoSpace, table: Optional[VertexTable] = None, labels: Optional[List[SuborbitLabel]] = None,
           pair_cap: int = 100000, vertex_cap: int = 20000, samples: int = 20, seed: int = 0) -> Dict:
    """Degree, lambda and mu histograms over unordered pairs, plus mu for the codimension-2 suborbits.

    Exhaustive over all pairs when they fit under pair_cap; otherwise one evaluation per suborbit label,
    weighted by suborbit length, cross-checked on randomly sampled raw pairs.
    """
    if space.delta != 2:
        raise GeometryError("the census is defined for delta = 2")
    params = qsrg_params(space.q, space.nu)
    pairs = params.n * (params.n - 1) // 2
    if pairs <= pair_cap:
        table = table or VertexTable(space, cap=vertex_cap)
        mode, body = "exhaustive", _exhaustive(space, table, labels)
    else:
        if params.n > vertex_cap:
            raise CapExceededError("census vertex table", params.n, vertex_cap)
        table = table or VertexTable(space, cap=vertex_cap)
        mode, body = "per-label", _per_label(space)
    p1 = basepoint(space)
    body['mu_far'] = {str(L): mu(space, p1, representative(space, L)) for L in all_labels(space.q, space.nu)
                      if joint_dim(space, p1, representative(space, L)) > space.nu + 2}
    mismatches = _sample_pairs(space, table, samples, seed)
    derived = {'lambda': derived_lambda(space.q)}
    if space.nu == 2:
        derived['mu_by_label'] = derived_mu_by_label(space.q, space.nu)
    discrepancies = stated_discrepancies(params.to_dict(), body['observed'])
    if discrepancies:
        logger.info("stated parameters differ from Lambda at %s: %s", space.describe(), discrepancies)
    logger.info("census of %s (%s): %s", space.describe(), mode, body['observed'])
    return {'params': params.to_dict(), 'derived': derived, 'discrepancies': discrepancies, 'mode': mode,
            'pairs': pairs, 'sampled_pairs': samples, 'sample_mismatches': mismatches, **body}


def census_checks(space: OrthoSpace, report: Dict) -> List[CheckResult]:
    """Structural checks on the census; stated-versus-observed differences live in report['discrepancies']."""
    params, derived, observed = report['params'], report['derived'], report['observed']
    q, suite = space.q, "qsrg"
    lambdas = sorted(observed['lambda_hist'])
    checks = [
        CheckResult(suite, "regular of degree k", list(observed['degree']) == [params['k']],
                    expected=params['k'], observed=sorted(observed['degree'])),
        CheckResult(suite, "lambda constant on edges", len(lambdas) == 1, expected=1, observed=lambdas),
        CheckResult(suite, "lambda equals q^2 - 2", lambdas == [derived['lambda']],
                    expected=derived['lambda'], observed=lambdas),
        CheckResult(suite, "mu vanishes beyond codimension 2", not any(report['mu_far'].values()),
                    expected=0, observed=report['mu_far']),
        CheckResult(suite, "sampled raw pairs agree with suborbit values", not report['sample_mismatches'],
                    expected=[], observed=report['sample_mismatches']),
    ]
    if 'mu_by_label' in derived:
        mu_values = sorted(observed['mu_hist'])
        checks.append(CheckResult(suite, "mu takes the values 0, q, q+1", mu_values == [0, q, q + 1],
                                  expected=[0, q, q + 1], observed=mu_values))
        checks.append(CheckResult(suite, "mu on codimension-2 suborbits",
                                  observed['mu_by_label'] == derived['mu_by_label'],
                                  expected=derived['mu_by_label'], observed=observed['mu_by_label']))
    if 'suborbit_mu_spread' in report:
        spread = report['suborbit_mu_spread']
        checks.append(CheckResult(suite, "mu constant on each suborbit", all(v == 1 for v in spread.values()),
                                  expected=1, observed=spread))
    return checks
