import math
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, BaseSettings, conint, root_validator, validator

from shorpython.helpers import dyadic


class GateKind(str, Enum):
    X = "X"
    H = "H"
    PHASE = "Phase"
    CPHASE = "CPhase"
    CCPHASE = "CCPhase"
    CNOT = "CNOT"
    TOFFOLI = "Toffoli"
    SWAP = "Swap"
    CSWAP = "CSwap"
    MEASURE = "Measure"
    CLASSICAL_X = "ClassicalX"
    CLASSICAL_PHASE = "ClassicalPhase"


# kind -> (number of targets, number of quantum controls)
GATE_ARITY = {
    GateKind.X: (1, 0),
    GateKind.H: (1, 0),
    GateKind.PHASE: (1, 0),
    GateKind.CPHASE: (1, 1),
    GateKind.CCPHASE: (1, 2),
    GateKind.CNOT: (1, 1),
    GateKind.TOFFOLI: (1, 2),
    GateKind.SWAP: (2, 0),
    GateKind.CSWAP: (2, 1),
    GateKind.MEASURE: (1, 0),
    GateKind.CLASSICAL_X: (1, 0),
    GateKind.CLASSICAL_PHASE: (1, 0),
}

PHASE_KINDS = frozenset(
    {GateKind.PHASE, GateKind.CPHASE, GateKind.CCPHASE, GateKind.CLASSICAL_PHASE}
)
CONDITIONED_KINDS = frozenset({GateKind.CLASSICAL_X, GateKind.CLASSICAL_PHASE})
NON_UNITARY_KINDS = CONDITIONED_KINDS | {GateKind.MEASURE}


class Gate(BaseModel):
    """One quantum instruction.

    Phase kinds carry their angle as an exact dyadic fraction of a full turn,
    ``2*pi*angle_num / 2**angle_den_pow2``, canonicalized into [0, 2*pi) on construction.
    """

    kind: GateKind
    targets: Tuple[int, ...]
    controls: Tuple[int, ...] = ()
    angle_num: Optional[int] = None
    angle_den_pow2: Optional[int] = None
    condition: Optional[int] = None
    clbit: Optional[int] = None

    class Config:
        frozen = True
        copy_on_model_validation = "none"

    @root_validator(skip_on_failure=True)
    def check_shape(cls, values):
        kind = values["kind"]
        targets = values["targets"]
        controls = values["controls"]
        n_targets, n_controls = GATE_ARITY[kind]
        if len(targets) != n_targets or len(controls) != n_controls:
            raise ValueError(
                "%s takes %d target(s) and %d control(s), got %s / %s"
                % (kind.value, n_targets, n_controls, list(targets), list(controls))
            )
        qubits = targets + controls
        if len(set(qubits)) != len(qubits):
            raise ValueError("targets and controls must be disjoint: %s" % list(qubits))
        if min(qubits) < 0:
            raise ValueError("qubit indices must be non-negative")

        num, pow2 = values.get("angle_num"), values.get("angle_den_pow2")
        if kind in PHASE_KINDS:
            if num is None or pow2 is None:
                raise ValueError("%s requires angle_num and angle_den_pow2" % kind.value)
            values["angle_num"], values["angle_den_pow2"] = dyadic.canonical(num, pow2)
        elif num is not None or pow2 is not None:
            raise ValueError("%s does not take an angle" % kind.value)

        condition = values.get("condition")
        if kind in CONDITIONED_KINDS:
            if condition is None or condition < 0:
                raise ValueError("%s requires a classical condition bit" % kind.value)
        elif condition is not None:
            raise ValueError("%s cannot be classically conditioned" % kind.value)

        clbit = values.get("clbit")
        if kind is GateKind.MEASURE:
            if clbit is None or clbit < 0:
                raise ValueError("Measure requires a classical bit")
        elif clbit is not None:
            raise ValueError("only Measure writes a classical bit")
        return values

    @property
    def angle(self) -> Optional[float]:
        if self.angle_num is None:
            return None
        return dyadic.to_radians(self.angle_num, self.angle_den_pow2)

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.targets + self.controls

    @property
    def is_unitary(self) -> bool:
        return self.kind not in NON_UNITARY_KINDS


class BlockMetadata(BaseModel):
    block: str
    n: Optional[int] = None
    a: Optional[int] = None
    N: Optional[int] = None
    kmax: Optional[int] = None
    inverse: bool = False


class Circuit(BaseModel):
    """Ordered gate sequence over ``num_qubits`` qubits and ``num_clbits`` classical bits."""

    num_qubits: conint(gt=0)
    num_clbits: conint(ge=0) = 0
    gates: Tuple[Gate, ...] = ()
    metadata: Optional[BlockMetadata] = None

    class Config:
        frozen = True
        copy_on_model_validation = "none"

    @root_validator(skip_on_failure=True)
    def check_ranges(cls, values):
        num_qubits, num_clbits = values["num_qubits"], values["num_clbits"]
        for position, gate in enumerate(values["gates"]):
            if max(gate.qubits) >= num_qubits:
                raise ValueError(
                    "gate %d (%s) addresses qubit %d outside 0..%d"
                    % (position, gate.kind.value, max(gate.qubits), num_qubits - 1)
                )
            for bit in (gate.condition, gate.clbit):
                if bit is not None and bit >= num_clbits:
                    raise ValueError(
                        "gate %d (%s) addresses classical bit %d outside 0..%d"
                        % (position, gate.kind.value, bit, num_clbits - 1)
                    )
        return values

    @property
    def is_unitary(self) -> bool:
        return all(gate.is_unitary for gate in self.gates)

    def __len__(self):
        return len(self.gates)

    def build_circuit(self):
        return Circuit(**self)


class BlockParams(BaseModel):
    """Classical parameters hardwired into an arithmetic block."""

    n: conint(ge=2)
    a: conint(ge=0)
    N: int
    kmax: conint(ge=1)
    require_coprime: bool = False

    @validator("N")
    def check_modulus(cls, N, values):
        if N < 3 or N % 2 == 0:
            raise ValueError("N must be odd and at least 3, got %d" % N)
        n = values.get("n")
        if n is not None and not (1 << (n - 1)) <= N < (1 << n):
            raise ValueError("N=%d is not a %d-bit number" % (N, n))
        return N

    @validator("kmax")
    def check_kmax(cls, kmax, values):
        n = values.get("n")
        if n is not None and kmax > n + 1:
            raise ValueError("kmax=%d exceeds the Fourier register width %d" % (kmax, n + 1))
        return kmax

    @root_validator(skip_on_failure=True)
    def check_addend(cls, values):
        a, N = values["a"], values["N"]
        if a >= N:
            raise ValueError("a=%d must be smaller than N=%d" % (a, N))
        if values["require_coprime"]:
            common = math.gcd(a, N)
            if common != 1:
                raise ValueError(
                    "a=%d and N=%d share the common factor %d" % (a, N, common)
                )
        return values


class RegisterLayout(BaseModel):
    """Qubit indices of the 2n+3 qubit construction, least significant bit first."""

    n: conint(ge=1)
    x: Tuple[int, ...]
    b: Tuple[int, ...]
    ancilla: int
    control: int

    @property
    def overflow(self) -> int:
        return self.b[-1]

    @property
    def num_qubits(self) -> int:
        return 2 * self.n + 3

    @classmethod
    def for_width(cls, n: int) -> "RegisterLayout":
        return cls(
            n=n,
            x=tuple(range(n)),
            b=tuple(range(n, 2 * n + 1)),
            ancilla=2 * n + 1,
            control=2 * n + 2,
        )


class QuantumState(BaseModel):
    """Dense amplitude vector; index bit q is the value of qubit q."""

    num_qubits: conint(gt=0)
    amplitudes: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        copy_on_model_validation = "none"

    @validator("amplitudes")
    def check_amplitudes(cls, amplitudes, values):
        num_qubits = values.get("num_qubits")
        if num_qubits is not None and amplitudes.shape != (1 << num_qubits,):
            raise ValueError(
                "expected %d amplitudes, got shape %s" % (1 << num_qubits, amplitudes.shape)
            )
        if amplitudes.dtype != np.complex128:
            raise ValueError("amplitudes must be complex128")
        return amplitudes

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


class RunResult(BaseModel):
    final_state: QuantumState
    clbits: List[int]
    rng_draws: int = 0


class MeasurementRecord(BaseModel):
    """The 2n bits read from the recycled control qubit, earliest first.

    Bit i carries weight 2**i in ``m`` and ``phase = m / 2**(2n)``.
    """

    n: conint(ge=1)
    bits: List[conint(ge=0, le=1)]
    m: Optional[int] = None
    phase: Optional[float] = None

    @root_validator(skip_on_failure=True)
    def derive_phase(cls, values):
        n, bits = values["n"], values["bits"]
        if len(bits) != 2 * n:
            raise ValueError("expected %d measured bits, got %d" % (2 * n, len(bits)))
        m = sum(bit << i for i, bit in enumerate(bits))
        if values.get("m") is not None and values["m"] != m:
            raise ValueError("m=%d does not match the measured bits" % values["m"])
        values["m"] = m
        values["phase"] = m / (1 << (2 * n))
        return values

    @property
    def phase_fraction(self) -> Fraction:
        return Fraction(self.m, 1 << (2 * self.n))


class OrderResult(BaseModel):
    N: int
    a: int
    r: Optional[int] = None
    record: MeasurementRecord
    validated: bool = False

    @root_validator(skip_on_failure=True)
    def check_validation(cls, values):
        r = values.get("r")
        if values["validated"]:
            if r is None or r < 1 or pow(values["a"], r, values["N"]) != 1:
                raise ValueError("r=%s is not a validated order" % r)
        return values

    def export(self) -> Dict[str, Any]:
        return {
            "bits": list(self.record.bits),
            "m": self.record.m,
            "phase": self.record.phase,
            "r": self.r,
            "validated": self.validated,
        }


class Route(str, Enum):
    EVEN = "even"
    PERFECT_POWER = "perfect-power"
    LUCKY_GCD = "lucky-gcd"
    ORDER_FINDING = "order-finding"


class AttemptOutcome(str, Enum):
    LUCKY_GCD = "lucky_gcd"
    NO_ORDER = "no_order"
    ODD_ORDER = "odd_order"
    TRIVIAL_ROOT = "trivial_root"
    TRIVIAL_FACTORS = "trivial_factors"
    SUCCESS = "success"


class Attempt(BaseModel):
    a: int
    r: Optional[int] = None
    outcome: AttemptOutcome


class FactorizationResult(BaseModel):
    N: int
    factor: int
    route: Route
    attempts: List[Attempt] = []
    seed: Optional[int] = None

    @root_validator(skip_on_failure=True)
    def check_factor(cls, values):
        N, factor = values["N"], values["factor"]
        if not 1 < factor < N or N % factor:
            raise ValueError("%d is not a nontrivial factor of %d" % (factor, N))
        return values

    @property
    def cofactor(self) -> int:
        return self.N // self.factor


class ResourceReport(BaseModel):
    n: conint(ge=2)
    kmax: conint(ge=1)
    qubits: int
    gate_counts: Dict[str, int]
    gates_total: int
    depth: Optional[int] = None
    predicted: Dict[str, float] = {}
    extrapolated: bool = False

    @root_validator(skip_on_failure=True)
    def check_totals(cls, values):
        if values["qubits"] != 2 * values["n"] + 3:
            raise ValueError("the construction uses exactly 2n+3 qubits")
        if values["gates_total"] != sum(values["gate_counts"].values()):
            raise ValueError("gates_total must equal the sum of the per-kind counts")
        return values


class ScalingReport(BaseModel):
    n_values: List[int]
    kmax_values: List[int]
    gates: List[int]
    depths: List[int]
    gate_exponent: float
    depth_exponent: float
    gate_residual: float
    depth_residual: float
    phi_add_depth_exponent: float


class FactorConfig(BaseSettings):
    """Settings of one factoring run; every field may come from a SHORPYTHON_* variable."""

    seed: Optional[conint(ge=0, lt=2 ** 64)] = None
    kmax: Optional[Union[conint(ge=1), Literal["exact"]]] = None
    max_attempts: conint(ge=1) = 10
    a: Optional[conint(ge=2)] = None

    class Config:
        env_prefix = "SHORPYTHON_"

    @staticmethod
    def default_kmax(n: int) -> int:
        """Exact below nine bits, ceil(lg n)+2 above."""
        if n <= 8:
            return n + 1
        return min(math.ceil(math.log2(n)) + 2, n + 1)

    def kmax_for(self, n: int) -> int:
        """Resolves the QFT truncation threshold for an n-bit modulus."""
        if self.kmax is None:
            return self.default_kmax(n)
        if self.kmax == "exact":
            return n + 1
        return min(self.kmax, n + 1)


class CliConfig(FactorConfig):
    output_format: Literal["text", "json", "csv"] = "text"
    workers: conint(ge=1) = 1


class SuiteResult(BaseModel):
    name: str
    passed: int = 0
    failed: int = 0
    failures: List[str] = []

    @property
    def ok(self) -> bool:
        return self.failed == 0
