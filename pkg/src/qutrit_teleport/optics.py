"""Second-quantized simulation of the six-photon teleportation experiment.

Photons live in modes labeled by (arm, rail, polarization, tag). The tag
tracks which-source distinguishability: photons from different sources
carry wavepacket vectors whose overlaps reproduce the pairwise HOM
visibilities, and tracing the tags out at the end damps exactly the
interference-mediated coherences of the teleported state.

The high-dimensional Bell-measurement circuit is built stage by stage
(PBS1, BD1_BD3, HWPS, BD2_BD4, AUX_PBS, HWP1_4, PROJ); with perfect
visibility and the rebalanced (2,2,1)/3 channel, the run succeeds with
probability 1/18 and reproduces the input state exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .errors import DimensionError
from .protocol import ChannelSpec

AMP_CUTOFF = 1e-14

H = "H"
V = "V"

DUMP_RAIL = -1  # beams displaced out of the collection path


@dataclass(frozen=True, order=True)
class Mode:
    arm: str
    rail: int
    pol: str
    tag: int = 0


class FockState:
    """Sparse superposition over photon-number patterns.

    Patterns are stored as sorted tuples of Modes with repetition;
    amplitudes refer to normalized Fock basis states, so the squared
    amplitudes of a normalized state sum to 1.
    """

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for pattern, amp in terms.items():
                if abs(amp) > AMP_CUTOFF:
                    self.terms[tuple(sorted(pattern))] = (
                        self.terms.get(tuple(sorted(pattern)), 0.0) + amp
                    )

    @classmethod
    def vacuum(cls):
        return cls({(): 1.0})

    def norm_squared(self):
        return float(sum(abs(a) ** 2 for a in self.terms.values()))

    def total_photons(self):
        counts = {len(p) for p in self.terms}
        if len(counts) > 1:
            raise ValueError(f"mixed photon numbers in one state: {counts}")
        return counts.pop() if counts else 0

    def scaled(self, factor):
        return FockState({p: a * factor for p, a in self.terms.items()})

    def normalized(self):
        n = math.sqrt(self.norm_squared())
        if n == 0:
            raise ValueError("cannot normalize an empty state")
        return self.scaled(1.0 / n)

    def tensor(self, other):
        out = {}
        for p1, a1 in self.terms.items():
            for p2, a2 in other.terms.items():
                pattern = tuple(sorted(p1 + p2))
                out[pattern] = out.get(pattern, 0.0) + a1 * a2 * _merge_factor(p1, p2)
        return FockState(out)

    def amplitude(self, modes):
        """Amplitude of the normalized Fock state with the given photon modes."""
        return self.terms.get(tuple(sorted(modes)), 0.0)

    def __repr__(self):
        parts = [f"{a:+.4f} |{p}>" for p, a in sorted(self.terms.items())]
        return "FockState(" + " ".join(parts) + ")"


def _occupations(pattern):
    occ = {}
    for m in pattern:
        occ[m] = occ.get(m, 0) + 1
    return occ


def _sym_factor(pattern):
    """sqrt(prod n_m!) converting monomial coefficients to Fock amplitudes."""
    f = 1.0
    for n in _occupations(pattern).values():
        f *= math.factorial(n)
    return math.sqrt(f)


def _merge_factor(p1, p2):
    """Bosonic factor when two normalized patterns are combined by tensoring."""
    return _sym_factor(p1 + p2) / (_sym_factor(p1) * _sym_factor(p2))


def single_photon(components):
    """One photon in a superposition of modes: [(Mode, amplitude), ...]."""
    return FockState({(m,): a for m, a in components})


class OpticalElement:
    """Base class: a linear element defined by its single-photon action.

    Subclasses implement ``action(mode) -> list[(Mode, coeff)] | None``;
    None means the element does not touch the mode.
    """

    kind = "element"

    def action(self, mode):
        raise NotImplementedError

    def apply(self, state):
        out = {}
        for pattern, amp in state.terms.items():
            # Work with the creation-monomial coefficient.
            mono = amp / _sym_factor(pattern)
            expansions = []
            for mode in pattern:
                mapped = self.action(mode)
                expansions.append([(mode, 1.0)] if mapped is None else mapped)
            for combo in itertools.product(*expansions):
                modes = tuple(sorted(m for m, _ in combo))
                coeff = mono
                for _, c in combo:
                    coeff *= c
                if abs(coeff) < AMP_CUTOFF:
                    continue
                out[modes] = out.get(modes, 0.0) + coeff * _sym_factor(modes)
        return FockState(out)

    def transfer_matrix(self, modes):
        """Single-photon transfer matrix restricted to (domain | image) modes."""
        domain = list(modes)
        image = []
        for m in domain:
            mapped = self.action(m)
            targets = [m] if mapped is None else [t for t, _ in mapped]
            for t in targets:
                if t not in image:
                    image.append(t)
        u = np.zeros((len(image), len(domain)), dtype=complex)
        for j, m in enumerate(domain):
            mapped = self.action(m)
            mapped = [(m, 1.0)] if mapped is None else mapped
            for t, c in mapped:
                u[image.index(t), j] = c
        return u


@dataclass(frozen=True)
class PBS(OpticalElement):
    """Polarizing beam splitter: transmits H, reflects V between two arms.

    Output ports are identified with the transmitted directions, so H
    stays in its arm while V hops to the partner arm. Reflection phases
    are absorbed into builder-level compensating phases.
    """

    arm_pair: tuple
    kind: str = field(default="PBS", init=False)

    def action(self, mode):
        if mode.arm not in self.arm_pair:
            return None
        if mode.pol == H:
            return [(mode, 1.0)]
        other = self.arm_pair[1] if mode.arm == self.arm_pair[0] else self.arm_pair[0]
        return [(Mode(other, mode.rail, mode.pol, mode.tag), 1.0)]


@dataclass(frozen=True)
class BD(OpticalElement):
    """Beam displacer: moves V-polarized light between rails, leaves H alone.

    ``rail_map`` gives the explicit (injective) rail relocation for V; it
    models where the displaced beams physically end up, including dump
    rails that leave the collection path.
    """

    arms: tuple
    rail_map: dict
    kind: str = field(default="BD", init=False)

    def __post_init__(self):
        targets = list(self.rail_map.values())
        if len(set(targets)) != len(targets):
            raise ValueError("BD rail map must be injective")

    def action(self, mode):
        if mode.arm not in self.arms or mode.pol != V:
            return None
        if mode.rail not in self.rail_map:
            return None
        return [(Mode(mode.arm, self.rail_map[mode.rail], V, mode.tag), 1.0)]


@dataclass(frozen=True)
class HWP(OpticalElement):
    """Half-wave plate at angle theta (degrees) on the selected arms/rails.

    H -> cos(2t) H + sin(2t) V,  V -> sin(2t) H - cos(2t) V.
    """

    angle_deg: float
    arms: tuple
    rails: tuple = None
    kind: str = field(default="HWP", init=False)

    def action(self, mode):
        if mode.arm not in self.arms:
            return None
        if self.rails is not None and mode.rail not in self.rails:
            return None
        t = math.radians(self.angle_deg)
        c, s = math.cos(2 * t), math.sin(2 * t)
        h = Mode(mode.arm, mode.rail, H, mode.tag)
        v = Mode(mode.arm, mode.rail, V, mode.tag)
        if mode.pol == H:
            return [(h, c), (v, s)]
        return [(h, s), (v, -c)]


@dataclass(frozen=True)
class PhaseShift(OpticalElement):
    """Phase factor exp(i phase) on modes matching (arms, rails, pol)."""

    phase: float
    arms: tuple
    rails: tuple = None
    pol: str = None
    kind: str = field(default="PhaseShift", init=False)

    def action(self, mode):
        if mode.arm not in self.arms:
            return None
        if self.rails is not None and mode.rail not in self.rails:
            return None
        if self.pol is not None and mode.pol != self.pol:
            return None
        return [(mode, np.exp(1j * self.phase))]


@dataclass(frozen=True)
class PostSelectionPattern:
    """Required exact photon counts per arm predicate.

    ``required`` is a list of (predicate(Mode) -> bool, exact count).
    """

    required: tuple

    def matches(self, pattern):
        for predicate, count in self.required:
            if sum(1 for m in pattern if predicate(m)) != count:
                return False
        return True


def arm_predicate(arm, exclude_dump=True):
    if exclude_dump:
        return lambda m, a=arm: m.arm == a and m.rail >= 0
    return lambda m, a=arm: m.arm == a


def post_select(state, pattern):
    """Keep matching patterns; return (renormalized state, kept probability)."""
    kept = {p: a for p, a in state.terms.items() if pattern.matches(p)}
    prob = float(sum(abs(a) ** 2 for a in kept.values()))
    if prob == 0:
        return FockState(), 0.0
    return FockState(kept).scaled(1.0 / math.sqrt(prob)), prob


@dataclass(frozen=True)
class VisibilityModel:
    """Pairwise HOM visibilities between photon sources.

    ``default`` applies to every interfering source pair unless an entry
    in ``pairwise`` (keys: frozenset of source names among
    {"p1", "p2", "aux_c", "aux_d"}) overrides it.
    """

    default: float = 1.0
    pairwise: dict = field(default_factory=dict)

    def __post_init__(self):
        for v in [self.default, *self.pairwise.values()]:
            if not 0.0 <= v <= 1.0:
                raise ValueError("visibility must lie in [0, 1]")

    def visibility(self, src_a, src_b):
        if src_a == src_b:
            return 1.0
        return self.pairwise.get(frozenset((src_a, src_b)), self.default)

    def tag_vectors(self):
        """Wavepacket vectors whose Gram matrix realizes sqrt(V) overlaps."""
        sources = ["p1", "p2", "aux_c", "aux_d"]
        n = len(sources)
        gram = np.eye(n)
        for i in range(n):
            for j in range(i + 1, n):
                s = math.sqrt(self.visibility(sources[i], sources[j]))
                gram[i, j] = gram[j, i] = s
        # Robust triangular factorization (Gram may be singular at V = 1):
        # eigen-factor, then rotate lower-triangular via QR so tag 0 is the
        # shared reference component and fully indistinguishable photons
        # carry a single tag.
        w, u = np.linalg.eigh(gram)
        factors = u @ np.diag(np.sqrt(np.clip(w, 0.0, None)))
        _, r = np.linalg.qr(factors.T)
        tri = r.T
        signs = np.sign(np.diag(tri))
        signs[signs == 0] = 1.0
        tri = tri * signs[None, :]
        keep = np.abs(tri).max(axis=0) > 1e-12
        tri = tri[:, keep]
        return {src: tri[i] for i, src in enumerate(sources)}


# --- circuit construction -------------------------------------------------

STAGE_NAMES = ("INPUT", "PBS1", "BD1_BD3", "HWPS", "BD2_BD4", "AUX_PBS", "HWP1_4")


@dataclass(frozen=True)
class Stage:
    name: str
    elements: tuple = ()
    post_selection: PostSelectionPattern = None
    inject_aux: bool = False


def one_photon_per_arm(arms):
    return PostSelectionPattern(tuple((arm_predicate(a), 1) for a in arms))


def build_hdbsm_circuit(dim=3):
    """Ordered stages of the three-dimensional Bell-measurement circuit.

    The signal photons enter in the path-polarization hybrid encoding
    |0> -> H rail0, |1> -> V rail1, |2> -> H rail2 and leave, after the
    two displacement stages, as {H, V} on rail 0 of arms a and b.
    """
    if dim != 3:
        raise DimensionError("the optical circuit is only constructed for dim 3")
    ab = ("a", "b")

    # Re-encode {H0, V1, H2} -> {V0, H0, H1}; under the half-wave sign
    # convention used here the composite is a plain relabeling (all +1).
    bd1_bd3 = (
        BD(ab, {1: 0}),
        HWP(45.0, ab, rails=(0,)),
        HWP(45.0, ab, rails=(2,)),
        BD(ab, {2: 1}),
        HWP(45.0, ab, rails=(1,)),
    )

    # Merge rail 1 into rail 0 as V; pre-existing V0 light is displaced
    # onto the dump rail and removed from the collection path.
    bd2_bd4 = (
        HWP(45.0, ab, rails=(1,)),
        BD(ab, {0: DUMP_RAIL, 1: 0}),
    )

    return (
        Stage("PBS1", elements=(PBS(("p1", "p2")),),
              post_selection=one_photon_per_arm(ab)),
        Stage("BD1_BD3", elements=bd1_bd3),
        Stage("HWPS", elements=(HWP(22.5, ab, rails=(0,)),)),
        Stage("BD2_BD4", elements=bd2_bd4,
              post_selection=_no_dump_photons()),
        Stage("AUX_PBS", inject_aux=True,
              elements=(PBS(("a", "c")), PBS(("b", "d"))),
              post_selection=one_photon_per_arm(("a", "b", "c", "d"))),
        Stage("HWP1_4", elements=(HWP(22.5, ("a", "b", "c", "d"), rails=(0,)),)),
    )


def _no_dump_photons():
    return PostSelectionPattern(((lambda m: m.rail < 0, 0),))


# The PBS1 output arms inherit from transmission: photon 1 transmits into
# arm a, photon 2 into arm b.
_PBS1_RELABEL = {"p1": "a", "p2": "b"}


HYBRID = {0: (0, H), 1: (1, V), 2: (2, H)}


def hybrid_photon(arm, amplitudes, tag_vector=None, source=None):
    """A photon in the hybrid path-polarization encoding of a qutrit."""
    comps = []
    tag_vector = tag_vector if tag_vector is not None else np.array([1.0])
    for level, amp in enumerate(amplitudes):
        if abs(amp) < AMP_CUTOFF:
            continue
        rail, pol = HYBRID[level]
        for tag, weight in enumerate(tag_vector):
            if abs(weight) < AMP_CUTOFF:
                continue
            comps.append((Mode(arm, rail, pol, tag), amp * weight))
    return single_photon(comps)


def initial_state(input_state, channel, visibility=None, include_trigger=True):
    """Photons 1, 2, 3 (and trigger) before the measurement circuit."""
    vis = visibility or VisibilityModel()
    tags = vis.tag_vectors()
    phi = algebra.check_pure_state(input_state, dim=3)

    photon1 = hybrid_photon("p1", phi, tags["p1"])
    # Entangled channel: photon 2 interferes, photon 3 never does.
    chan = FockState()
    for k, s in enumerate(channel.schmidt_coefficients):
        if s == 0:
            continue
        basis = np.zeros(3)
        basis[k] = 1.0
        pair = hybrid_photon("p2", basis, tags["p2"]).tensor(
            hybrid_photon("p3", basis)
        )
        chan = _add(chan, pair.scaled(s))
    state = photon1.tensor(chan)
    if include_trigger:
        state = state.tensor(single_photon([(Mode("t", 0, H), 1.0)]))
    return state


def aux_pair_state(visibility=None):
    """The auxiliary polarization-entangled pair (|HH> + |VV>)/sqrt2 on c, d."""
    vis = visibility or VisibilityModel()
    tags = vis.tag_vectors()
    state = FockState()
    for pol in (H, V):
        basis = {H: (1.0, 0.0), V: (0.0, 1.0)}[pol]
        c = single_photon(
            [(Mode("c", 0, pol, t), w) for t, w in enumerate(tags["aux_c"]) if abs(w) > AMP_CUTOFF]
        )
        d = single_photon(
            [(Mode("d", 0, pol, t), w) for t, w in enumerate(tags["aux_d"]) if abs(w) > AMP_CUTOFF]
        )
        state = _add(state, c.tensor(d).scaled(1 / math.sqrt(2)))
    return state


def _add(a, b):
    out = dict(a.terms)
    for p, amp in b.terms.items():
        out[p] = out.get(p, 0.0) + amp
    return FockState(out)


def _relabel_arms(state, mapping):
    out = {}
    for pattern, amp in state.terms.items():
        new = tuple(
            sorted(Mode(mapping.get(m.arm, m.arm), m.rail, m.pol, m.tag) for m in pattern)
        )
        out[new] = out.get(new, 0.0) + amp
    return FockState(out)


def run_circuit(input_state, channel, visibility=None, through_stage="HWP1_4"):
    """Run the measurement circuit up to (and including) the named stage.

    Returns the (sub-normalized) FockState; its squared norm is the
    probability of having survived all post-selections so far.
    """
    if through_stage not in STAGE_NAMES:
        raise ValueError(f"unknown stage {through_stage!r}")
    vis = visibility or VisibilityModel()
    state = initial_state(input_state, channel, vis)
    if through_stage == "INPUT":
        return state
    for stage in build_hdbsm_circuit():
        if stage.inject_aux:
            state = state.tensor(aux_pair_state(vis))
        for element in stage.elements:
            state = element.apply(state)
        if stage.name == "PBS1":
            state = _relabel_arms(state, _PBS1_RELABEL)
        if stage.post_selection is not None:
            kept = {
                p: a for p, a in state.terms.items() if stage.post_selection.matches(p)
            }
            state = FockState(kept)
        if stage.name == through_stage:
            return state
    raise AssertionError("unreachable")


PROJ_PATTERNS = tuple(itertools.product((H, V), repeat=4))


def _decode_photon3(mode):
    for level, (rail, pol) in HYBRID.items():
        if mode.rail == rail and mode.pol == pol:
            return level
    return None


def run_teleportation(input_state, channel=None, visibility=None, stage=None):
    """Full run: returns (rho3, success_probability[, intermediate state]).

    The four measured photons are projected onto all 16 H/V patterns;
    odd-parity patterns receive the feed-forward sign flip on level |2>.
    The teleported density matrix is the tag-traced mixture over patterns.
    """
    channel = channel or ChannelSpec.rebalanced()
    vis = visibility or VisibilityModel()
    intermediate = run_circuit(input_state, channel, vis, stage) if stage else None
    final = run_circuit(input_state, channel, vis, "HWP1_4")

    rho = np.zeros((3, 3), dtype=complex)
    total_prob = 0.0
    measured_arms = ("a", "b", "c", "d")
    for pols in PROJ_PATTERNS:
        parity = sum(1 for p in pols if p == V) % 2
        # amplitude vectors over (level, photon-3 tag is fixed) keyed by
        # the tag content of the measured photons
        vectors = {}
        for pattern, amp in final.terms.items():
            meas = {m.arm: m for m in pattern if m.arm in measured_arms}
            p3 = [m for m in pattern if m.arm == "p3"]
            if len(meas) != 4 or len(p3) != 1:
                continue
            if any(meas[a].pol != pol for a, pol in zip(measured_arms, pols)):
                continue
            level = _decode_photon3(p3[0])
            if level is None:
                continue
            tag_key = tuple(meas[a].tag for a in measured_arms)
            vec = vectors.setdefault(tag_key, np.zeros(3, dtype=complex))
            sign = -1.0 if (parity == 1 and level == 2) else 1.0
            vec[level] += sign * amp
        for vec in vectors.values():
            rho += np.outer(vec, vec.conj())
            total_prob += float(np.vdot(vec, vec).real)
    if total_prob > 0:
        rho /= total_prob
    result = (rho, total_prob)
    if stage is not None:
        result = result + (intermediate,)
    return result


def visibility_damping_factor(model, coherence):
    """Multiplicative damping of one output coherence under partial visibility.

    Derived from the tag trace-out: each coherence is damped by the
    product of wavepacket overlaps of the photons that swap detection
    ports between the two interfering branches. For levels (0,1) that is
    the photon-1/photon-2 overlap squared; (0,2) involves the two
    signal-auxiliary swaps; (1,2) mixes all four sources.
    """
    j, k = sorted(coherence)
    s = {
        pair: math.sqrt(model.visibility(*pair))
        for pair in [
            ("p1", "p2"),
            ("p1", "aux_c"),
            ("p1", "aux_d"),
            ("p2", "aux_c"),
            ("p2", "aux_d"),
        ]
    }
    if (j, k) == (0, 1):
        return s[("p1", "p2")] ** 2
    if (j, k) == (0, 2):
        return s[("p1", "aux_c")] ** 2 * s[("p2", "aux_d")] ** 2
    if (j, k) == (1, 2):
        return (
            s[("p2", "aux_c")]
            * s[("p1", "aux_c")]
            * s[("p1", "aux_d")]
            * s[("p2", "aux_d")]
        )
    raise ValueError(f"unknown coherence pair {coherence}")


def mix_white_noise(rho, fraction):
    """Optional double-pair-emission model: white-noise admixture."""
    if not 0 <= fraction <= 1:
        raise ValueError("noise fraction must lie in [0, 1]")
    return (1 - fraction) * rho + fraction * np.eye(3) / 3.0


__all__ = [
    "Mode",
    "FockState",
    "OpticalElement",
    "PBS",
    "BD",
    "HWP",
    "PhaseShift",
    "PostSelectionPattern",
    "post_select",
    "arm_predicate",
    "one_photon_per_arm",
    "VisibilityModel",
    "Stage",
    "STAGE_NAMES",
    "build_hdbsm_circuit",
    "hybrid_photon",
    "single_photon",
    "initial_state",
    "aux_pair_state",
    "run_circuit",
    "run_teleportation",
    "visibility_damping_factor",
    "mix_white_noise",
]
