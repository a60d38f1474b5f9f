"""Equivariant homology, the cohomology module action and the comparison with ``X/G``.

Everything is computed from one :class:`EquivariantModel`: a Borel sequence
truncated to the cells needed for degrees ``0..max_degree``, optionally Morse
reduced stage by stage, together with its finite telescope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from .borel import BorelSequence, borel_sequence
from .chaincx import (
    ChainComplex,
    ChainComplexError,
    ChainMap,
    CohomologyBasis,
    GradedMap,
    HomologyBasis,
    betti_numbers,
    homology_matrix,
    is_homology_iso,
)
from .f2linalg import F2Matrix
from .groups import GroupError
from .morsered import SequenceReduction, reduce_sequence
from .simplicial import Cochain, GroupAction, OrbitComplex, SimplicialComplex, cup
from .telescope import ComplexSequence, TelescopeComplex, TelescopeMorphism, retraction, tel_build, tel_map

def matrix_rows(m: F2Matrix) -> list[str]:
    """Rows as strings of 0/1 for compact reports."""
    return ["".join(str(b) for b in row) for row in m.tolist()]


MODEL_NOTE = (
    "per-stage columns are specific to the Milnor-join model of EG_N; "
    "only certified ranks are model independent"
)


class InstabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class StagePolicy:
    """How many Borel stages to build.

    With ``stages`` set exactly that many increments are used.  Otherwise the
    build starts at ``max_degree + start_offset`` and adds stages until every
    requested degree carries a certificate, giving up after ``max_extra``
    additional stages.
    """

    stages: int | None = None
    start_offset: int = 2
    max_extra: int = 4
    morse_reduce: bool = False


@dataclass
class DegreeEntry:
    degree: int
    stage_betti: list[int]
    telescope_betti: int
    iso_k: bool
    iso_k1: bool
    certificate_stage: int

    @property
    def in_range(self) -> bool:
        """``k + 1 <= K - 1``: both certified degrees lie below the connectivity of ``EG_K``."""
        return self.degree + 2 <= self.certificate_stage

    @property
    def stable(self) -> bool:
        return self.in_range and self.iso_k and self.iso_k1

    @property
    def rank(self) -> int | None:
        return self.telescope_betti if self.stable else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "stage_betti": list(self.stage_betti),
            "telescope_betti": self.telescope_betti,
            "stable": self.stable,
            "certificate": {
                "stage": self.certificate_stage,
                "iso_on_H_k": self.iso_k,
                "iso_on_H_k_plus_1": self.iso_k1,
                "within_connectivity_range": self.in_range,
            },
            "rank": self.rank if self.stable else "unstable at this K",
        }


@dataclass
class EquivariantReport:
    group: str
    space: str
    max_degree: int
    K: int
    morse_reduced: bool
    stage_sizes: list[int]
    entries: list[DegreeEntry]

    @property
    def ranks(self) -> list[int | None]:
        return [e.rank for e in self.entries]

    @property
    def stable(self) -> bool:
        return all(e.stable for e in self.entries)

    def to_dict(self) -> dict[str, Any]:
        return {
            "group": self.group,
            "space": self.space,
            "max_degree": self.max_degree,
            "stages": self.K,
            "morse_reduced": self.morse_reduced,
            "stage_sizes": list(self.stage_sizes),
            "degrees": [e.to_dict() for e in self.entries],
            "stable": self.stable,
            "model_note": MODEL_NOTE,
        }

    def betti_table(self) -> str:
        """TSV: one row per degree, one column per stage, then the stable rank."""
        head = ["degree"] + [f"X_{n}" for n in range(self.K + 1)] + ["telescope", "stable"]
        lines = ["\t".join(head)]
        for e in self.entries:
            stable = str(e.rank) if e.stable else "unstable"
            lines.append("\t".join([str(e.degree)] + [str(b) for b in e.stage_betti] + [str(e.telescope_betti), stable]))
        return "\n".join(lines) + "\n"


class EquivariantModel:
    """Borel stages for degrees ``0..max_degree`` plus the derived chain-level data."""

    def __init__(
        self,
        x: SimplicialComplex,
        act: GroupAction,
        max_degree: int,
        policy: StagePolicy = StagePolicy(),
        space_name: str = "space",
    ):
        if max_degree < 0:
            raise ValueError("max_degree must be non-negative")
        self.x = x
        self.act = act
        self.max_degree = max_degree
        self.policy = policy
        self.space_name = space_name
        self.max_dim = max_degree + 2
        if policy.stages is not None:
            if policy.stages < 1:
                raise ValueError("need at least one increment")
            self.borel = borel_sequence(x, act, policy.stages, self.max_dim)
        else:
            start = max(1, max_degree + policy.start_offset)
            self.borel = borel_sequence(x, act, start, self.max_dim)
            for _ in range(policy.max_extra):
                if all(self._certified(k) for k in range(max_degree + 1)):
                    break
                self.borel.extend()
                self._reset()

    def _reset(self) -> None:
        for key in ("reduction", "sequence", "telescope", "_stage_betti"):
            self.__dict__.pop(key, None)

    @property
    def K(self) -> int:
        return self.borel.K

    @cached_property
    def reduction(self) -> SequenceReduction | None:
        if not self.policy.morse_reduce:
            return None
        return reduce_sequence(self.borel.chain_seq)

    @cached_property
    def sequence(self) -> ComplexSequence:
        """The chain sequence actually used (reduced when requested)."""
        if self.reduction is not None:
            return self.reduction.reduced
        return self.borel.chain_seq

    @cached_property
    def telescope(self) -> TelescopeComplex:
        return tel_build(self.sequence)

    @cached_property
    def _stage_betti(self) -> list[list[int]]:
        out = []
        for c in self.sequence.stages:
            b = betti_numbers(c, self.max_degree + 1)
            out.append(b + [0] * (self.max_degree + 2 - len(b)))
        return out

    def _certificate(self, k: int) -> tuple[bool, bool]:
        inc = self.sequence.increments[-1]
        return is_homology_iso(inc, k), is_homology_iso(inc, k + 1)

    def _certified(self, k: int) -> bool:
        return k + 2 <= self.K and self._certificate(k) == (True, True)

    def report(self) -> EquivariantReport:
        tel_betti = betti_numbers(self.telescope.underlying, self.max_degree)
        stage_betti = self._stage_betti
        if tel_betti != stage_betti[-1][: self.max_degree + 1]:
            raise ChainComplexError("telescope and final stage disagree; the retraction invariant failed")
        entries = []
        for k in range(self.max_degree + 1):
            ik, ik1 = self._certificate(k)
            entries.append(DegreeEntry(k, [b[k] for b in stage_betti], tel_betti[k], ik, ik1, self.K))
        return EquivariantReport(
            group=self.act.group.name,
            space=self.space_name,
            max_degree=self.max_degree,
            K=self.K,
            morse_reduced=self.policy.morse_reduce,
            stage_sizes=[c.size() for c in self.sequence.stages],
            entries=entries,
        )

    # -- pieces shared by the module action and the comparison maps ------------

    @property
    def top_stage(self) -> ChainComplex:
        return self.sequence.stages[-1]

    def stable_degrees(self) -> set[int]:
        return {k for k in range(self.max_degree + 1) if self._certified(k)}


def equivariant_report(
    x: SimplicialComplex,
    act: GroupAction,
    max_degree: int,
    policy: StagePolicy = StagePolicy(),
    space_name: str = "space",
) -> EquivariantReport:
    return EquivariantModel(x, act, max_degree, policy, space_name).report()


def equivariant_betti(
    x: SimplicialComplex, act: GroupAction, k: int, policy: StagePolicy = StagePolicy()
) -> DegreeEntry:
    """Report entry for ``H_k^G(x)``."""
    return EquivariantModel(x, act, k, policy).report().entries[k]


# -- module action ---------------------------------------------------------------


@dataclass
class ActionGenerator:
    degree: int
    index: int
    cocycle: int

    @property
    def name(self) -> str:
        return f"h{self.degree}_{self.index}"


@dataclass
class ModuleActionTable:
    group: str
    K: int
    action_degree: int
    generators: list[ActionGenerator]
    matrices: dict[tuple[str, int], F2Matrix]
    unstable: list[int]
    products_compatible: bool | None = None

    def matrix(self, gen: ActionGenerator | str, k: int) -> F2Matrix:
        name = gen if isinstance(gen, str) else gen.name
        return self.matrices[(name, k)]

    def to_dict(self) -> dict[str, Any]:
        gens = []
        for g in self.generators:
            acts = []
            for k in range(g.degree, self.max_degree + 1):
                m = self.matrices.get((g.name, k))
                acts.append({
                    "from_degree": k,
                    "to_degree": k - g.degree,
                    "matrix": matrix_rows(m) if m is not None else "unstable",
                    "rank": m.rank() if m is not None else None,
                })
            gens.append({"name": g.name, "degree": g.degree, "actions": acts})
        return {
            "group": self.group,
            "stages": self.K,
            "action_degree": self.action_degree,
            "generators": gens,
            "unstable_degrees": list(self.unstable),
            "products_compatible": self.products_compatible,
            "action": "bimodule action (left = right in the cellular model)",
            "model_note": MODEL_NOTE,
        }

    max_degree: int = 0


class ModuleAction:
    """Cap action of ``H*(B_K)`` on ``H_*(X_K)``, pulled back along the EG factor."""

    def __init__(self, model: EquivariantModel):
        self.model = model
        self.stage = model.borel.stages[-1]
        self.bn: OrbitComplex = self.stage.bn
        self.cells = self.stage.xn
        red = model.reduction
        self.red = red.reductions[-1] if red is not None else None
        self.bases = [HomologyBasis(model.top_stage, k) for k in range(model.max_degree + 1)]
        self.stable = model.stable_degrees()

    def cohomology_basis(self, d: int) -> CohomologyBasis:
        return CohomologyBasis(self.bn.chain_complex, d)

    def cap(self, k: int, chain: int, d: int, cocycle: int) -> int:
        """Chain of degree ``k`` in the working complex capped with a cocycle of ``B_K``."""
        if self.red is None:
            return self.cells.cap_bits(k, chain, d, cocycle)
        big = self.red.include[k].apply(chain)
        return self.red.project[k - d].apply(self.cells.cap_bits(k, big, d, cocycle))

    def matrix(self, d: int, cocycle: int, k: int) -> F2Matrix:
        src, dst = self.bases[k], self.bases[k - d]
        cols = [dst.coordinates(self.cap(k, z, d, cocycle)) for z in src.representatives]
        return F2Matrix.from_columns(cols, len(dst))

    def cup(self, d1: int, a: int, d2: int, b: int) -> int:
        ca = Cochain.from_bits(self.bn, d1, a)
        cb = Cochain.from_bits(self.bn, d2, b)
        return cup(ca, cb).values.bits

    def table(self, action_degree: int) -> ModuleActionTable:
        top = self.model.max_degree
        gens = []
        for d in range(min(action_degree, top) + 1):
            for i, z in enumerate(self.cohomology_basis(d).representatives):
                gens.append(ActionGenerator(d, i, z))
        mats = {}
        for g in gens:
            for k in range(g.degree, top + 1):
                if k in self.stable and k - g.degree in self.stable:
                    mats[(g.name, k)] = self.matrix(g.degree, g.cocycle, k)
        table = ModuleActionTable(
            group=self.model.act.group.name,
            K=self.model.K,
            action_degree=action_degree,
            generators=gens,
            matrices=mats,
            unstable=sorted(set(range(top + 1)) - self.stable),
            max_degree=top,
        )
        table.products_compatible = self.check_products(gens)
        return table

    def check_products(self, gens: list[ActionGenerator]) -> bool:
        """``action(a cup b) = action(b) action(a)`` wherever all three are stable."""
        top = self.model.max_degree
        for a in gens:
            for b in gens:
                d = a.degree + b.degree
                ab = self.cup(a.degree, a.cocycle, b.degree, b.cocycle)
                for k in range(d, top + 1):
                    if not {k, k - a.degree, k - d} <= self.stable:
                        continue
                    lhs = self.matrix(d, ab, k)
                    rhs = self.matrix(b.degree, b.cocycle, k - a.degree) @ self.matrix(a.degree, a.cocycle, k)
                    if lhs != rhs:
                        return False
        return True


def module_action(
    x: SimplicialComplex,
    act: GroupAction,
    action_degree: int,
    max_degree: int,
    policy: StagePolicy = StagePolicy(),
) -> ModuleActionTable:
    return ModuleAction(EquivariantModel(x, act, max_degree, policy)).table(action_degree)


# -- comparison with the quotient --------------------------------------------------


@dataclass
class KirwanResult:
    degree: int
    stable: bool
    matrix: F2Matrix | None
    inverse: F2Matrix | None

    @property
    def is_iso(self) -> bool:
        return self.inverse is not None

    def two_sided(self) -> bool:
        if self.matrix is None or self.inverse is None:
            return False
        n = self.matrix.nrows
        eye = F2Matrix.identity(n)
        return self.inverse @ self.matrix == eye and self.matrix @ self.inverse == eye

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "stable": self.stable,
            "K": matrix_rows(self.matrix) if self.matrix is not None else "unstable",
            "K_prime": matrix_rows(self.inverse) if self.inverse is not None else None,
            "isomorphism": self.is_iso,
            "two_sided_inverse": self.two_sided(),
            "K_prime_note": "K' derived as the homology inverse of K",
        }


class KirwanComparison:
    """``H_*^G(X) -> H_*(X/G)`` for actions free on vertices, through telescopes.

    Each stage maps to ``X/G`` by forgetting the EG factor.  These maps commute
    on the nose with the increments, so they form a telescope morphism into
    the constant sequence on ``X/G`` (with zero correction terms); its
    telescope map followed by the retraction gives the comparison.
    """

    def __init__(self, model: EquivariantModel):
        if not model.act.is_free_on_vertices():
            raise GroupError("the comparison with X/G needs an action free on vertices")
        self.model = model
        self.quotient = OrbitComplex(model.act, max_dim=model.max_dim)
        stages = model.borel.stages
        target = self.quotient.chain_complex
        if target.top_degree > model.max_dim:
            target = target.truncate(model.max_dim)
        proj = [st.proj_x(self.quotient, target) for st in stages]
        const = ComplexSequence.constant(target, model.K)
        red = model.reduction
        if red is None:
            phi = proj
            kappa = [GradedMap.zero(c, target, 1) for c in model.sequence.stages[:-1]]
        else:
            rs = red.reductions
            phi = [proj[n].compose(rs[n].include) for n in range(len(rs))]
            kappa = [
                proj[n + 1].compose(rs[n + 1].homotopy.compose(model.borel.chain_seq.increments[n].compose(rs[n].include)))
                for n in range(model.K)
            ]
        self.morphism = TelescopeMorphism(model.sequence, const, phi, kappa)
        self.chain_map: ChainMap = retraction(tel_build(const)).compose(tel_map(self.morphism, model.telescope))
        self.stable = model.stable_degrees()

    def at(self, k: int) -> KirwanResult:
        if k not in self.stable:
            return KirwanResult(k, False, None, None)
        m = homology_matrix(self.chain_map, k)
        try:
            inv = m.inverse()
        except ValueError:
            inv = None
        return KirwanResult(k, True, m, inv)


def kirwan_K(x: SimplicialComplex, act: GroupAction, k: int, policy: StagePolicy = StagePolicy()) -> F2Matrix:
    res = KirwanComparison(EquivariantModel(x, act, k, policy)).at(k)
    if res.matrix is None:
        raise InstabilityError(f"degree {k} is not stable at the available stages")
    return res.matrix


def kirwan_Kprime(x: SimplicialComplex, act: GroupAction, k: int, policy: StagePolicy = StagePolicy()) -> F2Matrix:
    res = KirwanComparison(EquivariantModel(x, act, k, policy)).at(k)
    if res.matrix is None:
        raise InstabilityError(f"degree {k} is not stable at the available stages")
    if res.inverse is None:
        raise ValueError(f"the comparison map is not invertible in degree {k}")
    return res.inverse
