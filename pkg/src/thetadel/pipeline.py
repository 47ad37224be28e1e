"""Kernelization pipelines, exact solving, verification and reporting."""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

from .approx import approximate, default_d
from .errors import BudgetExceeded, PreconditionError
from .graph import (Instance, Multigraph, RuleApplication, components,
                    sorted_vertices)
from .minors import (DEG_MAX, N_MAX, blocks, exact_hitting_set, has_theta_c,
                     is_cactus_multigraph, is_k1t_free)
from .protrusion import (RepresentativeCache, component_protrusions,
                         default_cache, pendant_protrusions,
                         protrusion_candidates,
                         replace_protrusion)
from .reduction import bound_degree, degree_bound
from .treedecomp import W_MAX

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Config:
    """Tunable constants and oracle budgets.

    ``d`` is the base treewidth (``None`` picks the default for ``c``),
    ``d_prime`` scales the phase-one width threshold, ``gamma`` overrides
    the minimum protrusion size per boundary size, and ``size_constant``
    scales the strict-mode kernel cutoff ``C·k²·(log₂k + 1)^{3/2}``.
    """

    d: Optional[int] = None
    d_prime: float = 4.0
    gamma: dict = field(default_factory=dict)
    n_max: int = N_MAX
    w_max: int = W_MAX
    deg_max: int = DEG_MAX
    seed: int = 0
    mode: str = "general"
    t: int = 3
    strict: bool = False
    size_constant: float = 8.0
    max_passes: int = 100

    def __post_init__(self):
        for name in ("n_max", "w_max", "deg_max", "max_passes"):
            if getattr(self, name) <= 0:
                raise PreconditionError(f"{name} must be positive")
        if self.d_prime <= 0 or self.size_constant <= 0:
            raise PreconditionError("constants must be positive")
        if self.mode not in ("general", "k1t-free"):
            raise PreconditionError(f"unknown mode {self.mode!r}")
        if self.mode == "k1t-free" and self.t < 3:
            raise PreconditionError("k1t-free mode needs t >= 3")
        object.__setattr__(self, "gamma", {int(r): int(v) for r, v in dict(self.gamma).items()})

    @classmethod
    def from_file(cls, path) -> "Config":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise PreconditionError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def base_d(self, c: int) -> int:
        return default_d(c) if self.d is None else self.d

    def size_cutoff(self, k: int) -> float:
        k = max(k, 1)
        return self.size_constant * k * k * (math.log2(k) + 1) ** 1.5


@dataclass
class KernelReport:
    c: int
    n_in: int
    m_in: int
    k_in: int
    n_out: int = 0
    m_out: int = 0
    k_out: int = 0
    verdict: str = "kernel"
    rule_counts: dict = field(default_factory=dict)
    passes: int = 0
    pass_seconds: list = field(default_factory=list)
    degree_excess: Optional[int] = None
    size_ratio: Optional[float] = None
    incomplete: bool = False
    incomplete_reason: str = ""
    config: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["schema_version"] = SCHEMA_VERSION
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_jsonable, **kw)


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted_vertices(x)
    if isinstance(x, tuple):
        return list(x)
    return repr(x)


def _trace_record(rec: RuleApplication) -> dict:
    return {"rule": rec.rule, "removed": list(rec.removed), "added": list(rec.added),
            "edges": [list(e) for e in rec.edges], "k_delta": rec.k_delta, "note": rec.note}


def _finish(report: KernelReport, inst: Instance, start_len: int) -> KernelReport:
    g = inst.graph
    report.n_out, report.m_out, report.k_out = g.n, g.m, inst.k
    new = inst.trace[start_len:]
    report.rule_counts = dict(Counter(rec.rule for rec in new))
    report.trace = [_trace_record(rec) for rec in new]
    if report.k_out >= 2:
        report.size_ratio = g.n / (report.k_out ** 2 * math.log2(report.k_out) ** 1.5)
    return report


def _cap(inst: Instance) -> Instance:
    over = [(u, v, inst.c) for u, v, m in inst.graph.pairs() if m > inst.c]
    if not over:
        return inst
    return inst.apply(RuleApplication("cap-multiplicity", edges=tuple(over)))


def _trivial_yes(inst: Instance) -> Instance:
    if inst.graph.n == 0:
        return inst
    return inst.apply(RuleApplication("trivial-yes", removed=tuple(sorted_vertices(inst.graph.vertices)),
                                      note="graph is θ_c-free"))


def initial_hitting_set(g: Multigraph, c: int, cfg: Config) -> frozenset:
    if c <= 3:
        return approximate(g, c, cfg.d, cfg.d_prime, cfg.n_max)
    return exact_hitting_set(g, c, cfg.n_max)


def _protrusion_pass(inst: Instance, S: frozenset, cfg: Config, cache: RepresentativeCache,
                     k1t: Optional[int] = None) -> tuple:
    """One round of replacements; returns ``(instance, S, changed)``."""
    c = inst.c
    changed = False
    for w in component_protrusions(inst.graph, min(2, cfg.w_max)):
        if not w.X <= inst.graph.vertices:
            continue
        before = inst
        inst = replace_protrusion(inst, w, gamma=1, cache=cache, k1t=k1t)
        if inst is not before:
            S = (S - w.X) | frozenset(inst.trace[-1].added)
            changed = True
    if changed:
        return inst, S, True
    d = cfg.base_d(c)
    pendant = pendant_protrusions(inst.graph, min(2, cfg.w_max))
    marked = protrusion_candidates(inst.graph, S, d)
    for w in pendant + marked:
        # hanging pieces are replaced whenever that shrinks the graph
        gamma = 2 if w in pendant else cfg.gamma.get(len(w.boundary))
        try:
            new = replace_protrusion(inst, w, gamma=gamma, cache=cache, k1t=k1t)
        except BudgetExceeded:
            continue
        if new is not inst:
            rec = new.trace[-1]
            S = (S - set(rec.removed)) | frozenset(rec.added)
            return new, S, True
    return inst, S, False


def kernelize_thetac(inst: Instance, cfg: Optional[Config] = None,
                     cache: Optional[RepresentativeCache] = None) -> tuple:
    """Alternate degree bounding and protrusion replacement.

    For c >= 3 only degree bounding runs and the report is marked
    incomplete.  Returns ``(instance, report)``; the instance's trace
    extends the input trace and replays to it.
    """
    cfg = cfg or Config()
    cache = cache if cache is not None else default_cache()
    c = inst.c
    start = len(inst.trace)
    report = KernelReport(c, inst.graph.n, inst.graph.m, inst.k, config=asdict(cfg))
    if c >= 3:
        report.incomplete, report.incomplete_reason = True, "no protrusion replacement for c >= 3"
    inst = _cap(inst)
    h_values: dict = {}
    try:
        for _ in range(cfg.max_passes):
            if inst.rejected:
                break
            t0 = time.perf_counter()
            report.passes += 1
            S = initial_hitting_set(inst.graph, c, cfg)
            if not S:
                break
            before = len(inst.trace)
            res = bound_degree(inst, S, cfg.n_max)
            inst, S, h_values = res.instance, res.hitting_set, res.h_values
            changed = len(inst.trace) > before
            if c <= 2 and not inst.rejected:
                inst, S, replaced = _protrusion_pass(inst, S, cfg, cache)
                changed = changed or replaced
            report.pass_seconds.append(time.perf_counter() - t0)
            if not changed:
                break
    except BudgetExceeded as exc:
        report.incomplete, report.incomplete_reason = True, str(exc)
    g = inst.graph
    if inst.rejected:
        report.verdict = "no-forced"
    elif not has_theta_c(g, c, cfg.n_max):
        report.verdict = "yes-forced"
        inst = _trivial_yes(inst)
    elif cfg.strict and g.n > cfg.size_cutoff(inst.k):
        report.verdict = "no-forced"
        report.extra["strict_cutoff"] = cfg.size_cutoff(inst.k)
    if h_values and report.verdict == "kernel":
        report.degree_excess = max(g.degree(v) - degree_bound(c, h) for v, h in h_values.items() if v in g)
    return inst, _finish(report, inst, start)


def kernelize_k1t(inst: Instance, t: int = 3, cfg: Optional[Config] = None,
                  cache: Optional[RepresentativeCache] = None) -> tuple:
    """Protrusion-only kernelization around an approximate solution (K_{1,t}-free inputs)."""
    cfg = cfg or Config(mode="k1t-free", t=t)
    cache = cache if cache is not None else default_cache()
    c = inst.c
    if c not in (1, 2):
        raise PreconditionError("K_{1,t}-free kernelization needs c in {1, 2}")
    if not is_k1t_free(inst.graph, t, cfg.deg_max):
        raise PreconditionError(f"graph contains an induced K_1,{t}")
    start = len(inst.trace)
    report = KernelReport(c, inst.graph.n, inst.graph.m, inst.k, config=asdict(cfg))
    inst = _cap(inst)
    try:
        X = approximate(inst.graph, c, cfg.d, cfg.d_prime, cfg.n_max)
        report.extra["approx_size"] = len(X)
        if cfg.strict and len(X) > cfg.size_cutoff(inst.k):
            report.verdict = "no-forced"
            return inst, _finish(report, inst, start)
        for _ in range(cfg.max_passes):
            t0 = time.perf_counter()
            report.passes += 1
            inst, X, changed = _protrusion_pass(inst, X, cfg, cache, k1t=t)
            report.pass_seconds.append(time.perf_counter() - t0)
            if not changed:
                break
    except BudgetExceeded as exc:
        report.incomplete, report.incomplete_reason = True, str(exc)
    if inst.rejected:
        report.verdict = "no-forced"
    elif not has_theta_c(inst.graph, c, cfg.n_max):
        report.verdict = "yes-forced"
        inst = _trivial_yes(inst)
    report.extra["linearity"] = inst.graph.n / max(report.k_in, 1)
    return inst, _finish(report, inst, start)


@dataclass(frozen=True)
class SolveResult:
    yes: bool
    certificate: Optional[frozenset]
    optimum: Optional[int]


def solve(inst: Instance, n_max: int = N_MAX) -> SolveResult:
    """Exact decision with a verified certificate on yes."""
    g, c = inst.graph, inst.c
    if inst.k < 0:
        return SolveResult(False, None, None)
    if inst.k >= g.n:
        S = frozenset(g.vertices)
        return SolveResult(True, S, None)
    S = exact_hitting_set(g, c, n_max)
    if len(S) <= inst.k:
        assert verify(g, c, S, n_max)
        return SolveResult(True, S, len(S))
    return SolveResult(False, None, len(S))


def verify(g: Multigraph, c: int, S, n_max: int = N_MAX) -> bool:
    S = frozenset(S)
    if not S <= g.vertices:
        raise PreconditionError("S is not a subset of V(g)")
    return not has_theta_c(g.remove_vertices(S), c, n_max)


def stats(g: Multigraph) -> dict:
    degs = Counter(g.degree(v) for v in g.vertices)
    comps = components(g)
    bl = blocks(g)
    return {
        "n": g.n,
        "m": g.m,
        "pairs": g.num_pairs(),
        "max_multiplicity": max((m for _, _, m in g.pairs()), default=0),
        "degree_histogram": {str(d): degs[d] for d in sorted(degs)},
        "components": len(comps),
        "blocks": len(bl),
        "largest_block": max((len(b) for b in bl), default=0),
        "cyclomatic_number": g.m - g.n + len(comps),
        "cactus": is_cactus_multigraph(g),
    }


def with_k(inst: Instance, k: int) -> Instance:
    return replace(inst, k=k)
