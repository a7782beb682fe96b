"""Classical pre- and post-processing around order finding."""
import logging
import math
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from shorpython import exceptions
from shorpython.models import (
    Attempt,
    AttemptOutcome,
    FactorConfig,
    FactorizationResult,
    Route,
)

logger = logging.getLogger(__name__)


def gcd(a: int, b: int) -> int:
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    return math.gcd(a, b)


def mod_inverse(a: int, N: int) -> Optional[int]:
    """x with a*x = 1 (mod N) and 0 < x < N, or None when gcd(a, N) != 1."""
    if N < 2:
        raise ValueError("modulus must be at least 2, got %d" % N)
    try:
        return pow(a, -1, N)
    except ValueError:
        return None


def mod_exp(a: int, k: int, N: int) -> int:
    if N < 2 or k < 0:
        raise ValueError("mod_exp needs N >= 2 and k >= 0")
    return pow(a, k, N)


def _integer_root(N: int, q: int) -> int:
    """Largest p with p**q <= N."""
    if q == 2:
        return math.isqrt(N)
    p = int(round(N ** (1.0 / q)))
    while p ** q > N:
        p -= 1
    while (p + 1) ** q <= N:
        p += 1
    return p


def is_perfect_power(N: int) -> Optional[Tuple[int, int]]:
    """(p, q) with p**q == N, q >= 2 and p as small as possible, or None.

    Scanning exponents from the largest down finds the smallest base first.
    """
    if N < 2:
        raise ValueError("N must be at least 2, got %d" % N)
    for q in range(N.bit_length(), 1, -1):
        p = _integer_root(N, q)
        if p > 1 and p ** q == N:
            return p, q
    return None


def continued_fraction_convergents(num: int, den: int) -> List[Tuple[int, int]]:
    """Convergents (p_k, q_k) of num/den for 0 <= num < den."""
    if not 0 <= num < den:
        raise ValueError("expected 0 <= num < den, got %d/%d" % (num, den))
    x = Fraction(num, den)
    convergents = []
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    while True:
        term = math.floor(x)
        if convergents:
            p, p_prev = term * p + p_prev, p
            q, q_prev = term * q + q_prev, q
        else:
            p, q, p_prev, q_prev = term, 1, 1, 0
        convergents.append((p, q))
        remainder = x - term
        if remainder == 0:
            return convergents
        x = 1 / remainder


def multiplicative_order(a: int, N: int) -> int:
    """Brute-force order of a modulo N (test oracle; requires gcd(a, N) == 1)."""
    if math.gcd(a, N) != 1:
        raise ValueError("%d has no order modulo %d" % (a, N))
    r, value = 1, a % N
    while value != 1:
        value = value * a % N
        r += 1
    return r


def _split_with_order(a: int, r: int, N: int) -> Tuple[Optional[int], AttemptOutcome]:
    if r % 2:
        return None, AttemptOutcome.ODD_ORDER
    half = mod_exp(a, r // 2, N)
    if half == N - 1:
        return None, AttemptOutcome.TRIVIAL_ROOT
    for candidate in (gcd(half - 1, N), gcd(half + 1, N)):
        if 1 < candidate < N:
            return candidate, AttemptOutcome.SUCCESS
    return None, AttemptOutcome.TRIVIAL_FACTORS


def shor_factor(
    N: int, config: Optional[FactorConfig] = None, rng: Optional[np.random.Generator] = None
) -> FactorizationResult:
    """Finds a nontrivial factor of N.

    Even N and perfect powers are handled classically. Otherwise up to
    ``config.max_attempts`` bases are tried: a lucky gcd returns immediately, else one
    semiclassical order-finding run supplies r and gcd(a^(r/2) +- 1, N) is tested.

    Args:
        :N (int): The composite to factor, N >= 4.
        :config (FactorConfig, optional): Attempts, forced base, kmax and seed.
        :rng (numpy.random.Generator, optional): Shared generator; built from config.seed if absent.

    Raises:
        :exceptions.FactoringError: Every attempt failed; ``.attempts`` holds the log.
    """
    from shorpython import orderfind

    config = config or FactorConfig()
    if N < 4:
        raise exceptions.FactoringError("N must be at least 4, got %d" % N, [], "Invalid input")

    if N % 2 == 0:
        logger.info("N=%d is even", N)
        return FactorizationResult(N=N, factor=2, route=Route.EVEN, seed=config.seed)

    power = is_perfect_power(N)
    if power:
        logger.info("N=%d = %d^%d", N, *power)
        return FactorizationResult(
            N=N, factor=power[0], route=Route.PERFECT_POWER, seed=config.seed
        )

    if rng is None:
        rng = np.random.default_rng(config.seed)
    n = N.bit_length()
    kmax = config.kmax_for(n)
    attempts: List[Attempt] = []

    for attempt in range(config.max_attempts):
        a = config.a if config.a is not None else int(rng.integers(2, N - 1))
        common = gcd(a, N)
        if common > 1:
            attempts.append(Attempt(a=a, outcome=AttemptOutcome.LUCKY_GCD))
            logger.info("attempt %d: gcd(%d, %d) = %d", attempt + 1, a, N, common)
            return FactorizationResult(
                N=N, factor=common, route=Route.LUCKY_GCD, attempts=attempts, seed=config.seed
            )

        result = orderfind.find_order(N, a, kmax=kmax, rng=rng)
        if not result.validated:
            attempts.append(Attempt(a=a, outcome=AttemptOutcome.NO_ORDER))
            logger.warning(
                "attempt %d: a=%d, phase %d/2^%d gave no order",
                attempt + 1, a, result.record.m, 2 * n,
            )
            continue

        factor, outcome = _split_with_order(a, result.r, N)
        attempts.append(Attempt(a=a, r=result.r, outcome=outcome))
        if factor:
            logger.info("attempt %d: a=%d, r=%d -> factor %d", attempt + 1, a, result.r, factor)
            return FactorizationResult(
                N=N,
                factor=factor,
                route=Route.ORDER_FINDING,
                attempts=attempts,
                seed=config.seed,
            )
        logger.warning("attempt %d: a=%d, r=%d rejected (%s)", attempt + 1, a, result.r, outcome.value)

    raise exceptions.FactoringError(
        "No factor of %d found in %d attempts" % (N, config.max_attempts),
        attempts,
        "Attempts exhausted",
    )
