"""Circuit generators for the Fourier-space arithmetic blocks.

All Fourier-basis blocks share one convention: the QFT has no terminal swap network, so
after ``build_qft`` qubit j of a register holding b carries the relative phase
exp(2*pi*i*b / 2**(j+1)). phi(b) always means that state.

Full-width blocks (``cmult``, ``cswap``, ``cua``) use the 2n+3 qubit layout returned by
:func:`register_layout`.
"""
import logging
from typing import Sequence

from pydantic import ValidationError

from shorpython import exceptions, numtheory
from shorpython.core import CircuitBuilder, invert_circuit, invert_gate
from shorpython.models import BlockMetadata, BlockParams, Circuit, RegisterLayout

logger = logging.getLogger(__name__)

BLOCK_NAMES = ("qft", "phiadd", "modadd", "cmult", "cswap", "cua")


def register_layout(n: int) -> RegisterLayout:
    """x-register, then b-register with its overflow qubit on top, then ancilla, then control."""
    return RegisterLayout.for_width(n)


def _block_params(n, a, N, kmax, require_coprime=False) -> BlockParams:
    try:
        return BlockParams(n=n, a=a, N=N, kmax=kmax, require_coprime=require_coprime)
    except ValidationError as e:
        raise exceptions.BlockParameterError(str(e), "Invalid block parameters")


def _emit_qft(builder: CircuitBuilder, register: Sequence[int], kmax: int):
    for j in reversed(range(len(register))):
        builder.h(register[j])
        for k in range(2, min(j + 1, kmax) + 1):
            builder.phase(register[j], 1, k, controls=(register[j - k + 1],))


def _emit_inverse_qft(builder: CircuitBuilder, register: Sequence[int], kmax: int):
    scratch = CircuitBuilder(builder.num_qubits)
    _emit_qft(scratch, register, kmax)
    builder.extend(invert_gate(gate) for gate in reversed(scratch.gates))


def _emit_phi_add(
    builder: CircuitBuilder,
    register: Sequence[int],
    a: int,
    controls: Sequence[int] = (),
    inverse: bool = False,
):
    # qubit j holds exp(2*pi*i*b/2**(j+1)); adding a multiplies it by exp(2*pi*i*a/2**(j+1))
    num = -a if inverse else a
    for j, qubit in enumerate(register):
        builder.phase(qubit, num, j + 1, controls)


def _emit_cc_phi_add_mod(
    builder: CircuitBuilder,
    register: Sequence[int],
    ancilla: int,
    controls: Sequence[int],
    a: int,
    N: int,
    kmax: int,
):
    overflow = register[-1]
    _emit_phi_add(builder, register, a, controls)
    _emit_phi_add(builder, register, N, inverse=True)
    _emit_inverse_qft(builder, register, kmax)
    builder.x(ancilla, controls=(overflow,))
    _emit_qft(builder, register, kmax)
    _emit_phi_add(builder, register, N, controls=(ancilla,))

    # restore the ancilla using (a+b) mod N >= a  <=>  a+b < N
    _emit_phi_add(builder, register, a, controls, inverse=True)
    _emit_inverse_qft(builder, register, kmax)
    builder.x(overflow)
    builder.x(ancilla, controls=(overflow,))
    builder.x(overflow)
    _emit_qft(builder, register, kmax)
    _emit_phi_add(builder, register, a, controls)


def _emit_cmult(builder: CircuitBuilder, layout: RegisterLayout, a: int, N: int, kmax: int):
    _emit_qft(builder, layout.b, kmax)
    for i, x_qubit in enumerate(layout.x):
        _emit_cc_phi_add_mod(
            builder,
            layout.b,
            layout.ancilla,
            (layout.control, x_qubit),
            (a << i) % N,
            N,
            kmax,
        )
    _emit_inverse_qft(builder, layout.b, kmax)


def _emit_controlled_swap(builder: CircuitBuilder, layout: RegisterLayout):
    # the overflow qubit of b is always 0 here, so only n pairs are swapped
    for x_qubit, b_qubit in zip(layout.x, layout.b):
        builder.x(x_qubit, controls=(b_qubit,))
        builder.x(b_qubit, controls=(layout.control, x_qubit))
        builder.x(x_qubit, controls=(b_qubit,))


def emit_controlled_ua(
    builder: CircuitBuilder, layout: RegisterLayout, a: int, a_inverse: int, N: int, kmax: int
):
    """Appends C-U_a to ``builder``; parameters are assumed validated."""
    _emit_cmult(builder, layout, a, N, kmax)
    _emit_controlled_swap(builder, layout)
    scratch = CircuitBuilder(builder.num_qubits)
    _emit_cmult(scratch, layout, a_inverse, N, kmax)
    builder.extend(invert_gate(gate) for gate in reversed(scratch.gates))


def build_qft(m: int, kmax: int) -> Circuit:
    """Swapless QFT on ``m`` qubits, dropping rotations 2*pi/2**k with k > kmax.

    Args:
        :m (int): Register width.
        :kmax (int): Truncation threshold; kmax >= m gives the exact transform.

    Returns:
        :Circuit: m qubits, qubit 0 least significant.
    """
    if m < 1 or kmax < 1:
        raise exceptions.BlockParameterError(
            "QFT needs m >= 1 and kmax >= 1, got m=%d kmax=%d" % (m, kmax),
            "Invalid block parameters",
        )
    builder = CircuitBuilder(m, metadata=BlockMetadata(block="qft", n=m, kmax=kmax))
    _emit_qft(builder, range(m), kmax)
    return builder.build()


def build_inverse_qft(m: int, kmax: int) -> Circuit:
    return invert_circuit(build_qft(m, kmax))


def build_phi_add_const(m: int, a: int, num_controls: int = 0) -> Circuit:
    """phi-ADD(a) on an m-qubit Fourier register (qubits 0..m-1).

    The controls, if any, are qubits m and m+1. Sandwiched between ``build_qft(m, m)`` and
    its inverse the block maps |b> to |(a+b) mod 2**m>.
    """
    if not 0 <= a < (1 << m):
        raise exceptions.BlockParameterError(
            "a=%d is outside 0..2^%d-1" % (a, m), "Invalid block parameters"
        )
    if num_controls not in (0, 1, 2):
        raise exceptions.BlockParameterError(
            "phi-ADD takes 0, 1 or 2 controls, got %d" % num_controls,
            "Invalid block parameters",
        )
    builder = CircuitBuilder(
        m + num_controls, metadata=BlockMetadata(block="phiadd", n=m - 1, a=a)
    )
    _emit_phi_add(builder, range(m), a, tuple(range(m, m + num_controls)))
    return builder.build()


def build_cc_phi_add_mod(n: int, a: int, N: int, kmax: int) -> Circuit:
    """Doubly controlled phi-ADD(a)MOD(N) over n+4 qubits.

    Layout: Fourier register 0..n (overflow qubit n), ancilla n+1, controls n+2 and n+3.
    Maps phi(b) to phi((a+b) mod N) for b < N when both controls are set, identity otherwise;
    the ancilla returns to |0>.
    """
    params = _block_params(n, a, N, kmax)
    builder = CircuitBuilder(
        n + 4, metadata=BlockMetadata(block="modadd", n=n, a=a, N=N, kmax=params.kmax)
    )
    _emit_cc_phi_add_mod(
        builder, range(n + 1), n + 1, (n + 2, n + 3), params.a, params.N, params.kmax
    )
    circuit = builder.build()
    logger.debug("modadd n=%d a=%d N=%d kmax=%d: %d gates", n, a, N, kmax, len(circuit))
    return circuit


def build_cmult_mod(n: int, a: int, N: int, kmax: int) -> Circuit:
    """CMULT(a)MOD(N): |c>|x>|b> -> |c>|x>|(b + a*x) mod N> when c = 1."""
    params = _block_params(n, a, N, kmax)
    layout = register_layout(n)
    builder = CircuitBuilder(
        layout.num_qubits,
        metadata=BlockMetadata(block="cmult", n=n, a=a, N=N, kmax=params.kmax),
    )
    _emit_cmult(builder, layout, params.a, params.N, params.kmax)
    circuit = builder.build()
    logger.debug("cmult n=%d a=%d N=%d: %d gates", n, a, N, len(circuit))
    return circuit


def build_controlled_swap_register(n: int) -> Circuit:
    """Swaps the low n qubits of the x- and b-registers when the control qubit is set."""
    if n < 1:
        raise exceptions.BlockParameterError(
            "n must be positive, got %d" % n, "Invalid block parameters"
        )
    layout = register_layout(n)
    builder = CircuitBuilder(layout.num_qubits, metadata=BlockMetadata(block="cswap", n=n))
    _emit_controlled_swap(builder, layout)
    return builder.build()


def build_controlled_ua(n: int, a: int, N: int, kmax: int) -> Circuit:
    """C-U_a: |x> -> |(a*x) mod N> for x < N when the control is set, b and ancilla clean.

    Raises:
        :exceptions.BlockParameterError: gcd(a, N) != 1; the message names the common factor.
    """
    params = _block_params(n, a, N, kmax, require_coprime=True)
    layout = register_layout(n)
    builder = CircuitBuilder(
        layout.num_qubits,
        metadata=BlockMetadata(block="cua", n=n, a=a, N=N, kmax=params.kmax),
    )
    emit_controlled_ua(
        builder, layout, params.a, numtheory.mod_inverse(a, N), params.N, params.kmax
    )
    circuit = builder.build()
    logger.debug("cua n=%d a=%d N=%d kmax=%d: %d gates", n, a, N, kmax, len(circuit))
    return circuit


def build_block(name: str, n: int, a: int, N: int, kmax: int) -> Circuit:
    """Builds one of :data:`BLOCK_NAMES` for an n-bit modulus."""
    if name == "qft":
        return build_qft(n + 1, kmax)
    if name == "phiadd":
        return build_phi_add_const(n + 1, a)
    if name == "modadd":
        return build_cc_phi_add_mod(n, a, N, kmax)
    if name == "cmult":
        return build_cmult_mod(n, a, N, kmax)
    if name == "cswap":
        return build_controlled_swap_register(n)
    if name == "cua":
        return build_controlled_ua(n, a, N, kmax)
    raise exceptions.BlockParameterError(
        "Unknown block %r, options are: %s" % (name, ", ".join(BLOCK_NAMES)),
        "Invalid block name",
    )
