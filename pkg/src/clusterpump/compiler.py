"""Compile commuting diagonal driving terms into S / CZ / Z circuits.

Every term is diagonal, so the evolution ``exp(-i t H)`` factorises into one
gate block per term.  For a Z-product ``P`` on ``w`` qubits,

    exp(-i (pi/4) P) = exp(-i pi/4) * prod_a S_a * prod_{a<b} CZ_ab

since on a basis state of Hamming weight ``w`` inside the support
``exp(-i pi/4) i**w (-1)**(w(w-1)/2) = exp(-i (pi/4) (-1)**w)``.  A negative coefficient
conjugates the block (S -> Sdg, phase -> +pi/4).  A CZ product ``T`` is an
involution, so ``exp(-i (pi/2) sign T) = -i sign T``.

Global phases are kept in units of pi/4 modulo 8.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from clusterpump.lattice import CZ_PRODUCT, Z_PRODUCT, HamTerm, LatticeSpec
from clusterpump.pauli import CliffordCircuit
from clusterpump.tableau import apply_circuit, new_plus_state, random_stabilizer_state, same_state


class PumpCompileError(ValueError):
    pass


def _quarter_turns(angle: float, unit: float) -> int:
    k = angle / unit
    kr = round(k)
    if not math.isclose(k, kr, abs_tol=1e-9):
        raise PumpCompileError(f"angle {angle} is not a multiple of {unit}; the evolution is not Clifford")
    return int(kr)


def compile_z_term(support, sign: int = 1, angle: float = math.pi / 4):
    """Gates and phase (eighths) realising ``exp(-i angle sign Z...Z)``."""
    if sign not in (1, -1):
        raise PumpCompileError("sign must be +1 or -1")
    support = [int(q) for q in support]
    if len(set(support)) != len(support) or not support:
        raise PumpCompileError("Z-product support must be non-empty and distinct")
    reps = _quarter_turns(angle, math.pi / 4) % 8
    one = "S" if sign == 1 else "SDG"
    gates, phase = [], 0
    for _ in range(reps):
        gates.extend((one, q) for q in support)
        gates.extend(("CZ", a, b) for i, a in enumerate(support) for b in support[i + 1:])
        phase -= sign
    return gates, phase % 8


def compile_cz_term(pairs, sign: int = 1, angle: float = math.pi / 2):
    """Gates and phase (eighths) realising ``exp(-i angle sign prod CZ)``."""
    if sign not in (1, -1):
        raise PumpCompileError("sign must be +1 or -1")
    reps = _quarter_turns(angle, math.pi / 2) % 4
    gates, phase = [], 0
    for _ in range(reps):
        gates.extend(("CZ", int(a), int(b)) for a, b in pairs)
        phase -= 2 * sign
    return gates, phase % 8


def compile_term(term: HamTerm):
    if term.kind == Z_PRODUCT:
        return compile_z_term(term.support, term.sign, term.angle)
    if term.kind == CZ_PRODUCT:
        return compile_cz_term(term.pairs, term.sign, term.angle)
    raise PumpCompileError(f"unknown term kind {term.kind}")


@dataclass
class CompiledPump:
    raw: CliffordCircuit
    reduced: CliffordCircuit
    s_exponent: np.ndarray  # net S power per site, mod 4
    s_applied: np.ndarray  # number of S-type gates per site before reduction
    cz_parity: dict = field(default_factory=dict)
    stray_sites: list = field(default_factory=list)

    def summary(self) -> dict:
        hist = Counter(int(v) for v in self.s_applied)
        res = Counter(int(v) for v in self.s_exponent)
        return {
            "n_qubits": self.raw.n,
            "raw_gates": {g: self.raw.count(g) for g in ("S", "SDG", "Z", "CZ")},
            "reduced_gates": {g: self.reduced.count(g) for g in ("S", "SDG", "Z", "CZ")},
            "global_phase_eighths": self.reduced.global_phase,
            "s_count_histogram": {str(k): hist[k] for k in sorted(hist)},
            "s_residue_histogram": {str(k): res[k] for k in sorted(res)},
            "stray_sites": list(self.stray_sites),
        }


def reduce_circuit(c: CliffordCircuit) -> tuple:
    """Merge a diagonal circuit: S powers mod 4 per site, CZ parity per pair.

    Returns ``(reduced, s_exponent, s_applied, cz_parity)``.
    """
    s_exp = np.zeros(c.n, dtype=np.int64)
    s_applied = np.zeros(c.n, dtype=np.int64)
    cz = Counter()
    for name, *qs in c.gates:
        if name == "S":
            s_exp[qs[0]] += 1
            s_applied[qs[0]] += 1
        elif name == "SDG":
            s_exp[qs[0]] -= 1
            s_applied[qs[0]] += 1
        elif name == "Z":
            s_exp[qs[0]] += 2
        elif name == "CZ":
            cz[tuple(sorted(qs))] += 1
        else:
            raise PumpCompileError(f"cannot merge non-diagonal gate {name}")
    s_exp %= 4
    out = CliffordCircuit(c.n, global_phase=c.global_phase)
    for q in range(c.n):
        e = int(s_exp[q])
        if e:
            out.append(("S", "Z", "SDG")[e - 1], q)
    parity = {pair: 1 for pair, k in sorted(cz.items()) if k % 2}
    for a, b in parity:
        out.append("CZ", a, b)
    return out, s_exp, s_applied, parity


def compile_pump(spec: LatticeSpec, *, strict: bool = True) -> CompiledPump:
    """Compile the full pump unitary and reduce it.

    After reduction only boundary sites may carry gates, except for a pure Z
    on bulk sites of lattices whose bulk ends in ``|->``.  With ``strict`` a
    violation raises :class:`PumpCompileError`; otherwise the offending sites
    are listed in ``stray_sites``.
    """
    raw = CliffordCircuit(spec.n)
    for term in spec.terms:
        gates, phase = compile_term(term)
        raw.extend(gates)
        raw.add_phase(phase)
    reduced, s_exp, s_applied, parity = reduce_circuit(raw)
    bset = set(spec.boundary)
    allowed = 2 if spec.bulk_flips_to_minus else 0
    stray = {q for q in spec.bulk if int(s_exp[q]) != allowed}
    for a, b in parity:
        stray.update(q for q in (a, b) if q not in bset)
    stray = sorted(stray)
    if strict and stray:
        raise PumpCompileError(f"pump acts on {len(stray)} bulk sites after reduction, e.g. {stray[:8]}")
    return CompiledPump(raw, reduced, s_exp, s_applied, parity, stray)


def equivalence_check(a: CliffordCircuit, b: CliffordCircuit, n_random: int = 8, seed: int = 0) -> bool:
    """Same action (up to global phase) on ``|+...+>`` and on random stabilizer states."""
    if a.n != b.n:
        return False
    rng = np.random.default_rng(seed)
    starts = [new_plus_state(a.n)] + [random_stabilizer_state(a.n, rng) for _ in range(n_random)]
    for t in starts:
        ta = apply_circuit(t.copy(), a)
        tb = apply_circuit(t.copy(), b)
        if not same_state(ta, tb):
            return False
    return True
