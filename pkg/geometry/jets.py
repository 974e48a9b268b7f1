"""
Jatos de Taylor bivariados truncados na ordem 3.

Um `Jet3` carrega o valor e todas as derivadas parciais até a terceira
ordem de uma função de (x, y) num ponto de expansão. Internamente os
coeficientes são guardados normalizados (coeficientes de Taylor,
t[i][j] = c[i][j] / (i! j!)) num array numpy de forma (10, *batch), o que
permite avaliar o mesmo jato em muitos pontos de uma vez.

O ponto de expansão não faz parte do jato; quem avalia é que o conhece.
"""
import logging
from math import factorial

import numpy as np

from .exceptions import DomainError, NEAR_SINGULAR, LOG_DOMAIN

logger = logging.getLogger(__name__)

ORDER = 3

# (i, j) -> x^i y^j, ordenados por grau total
MONOMIALS = tuple((d - j, j) for d in range(ORDER + 1) for j in range(d + 1))
INDEX = {m: k for k, m in enumerate(MONOMIALS)}
SIZE = len(MONOMIALS)

_SCALE = np.array([factorial(i) * factorial(j) for i, j in MONOMIALS], dtype=float)

# tabela do produto truncado: _PRODUCT[m, k, l] = 1 quando x^k * x^l = x^m
_PRODUCT = np.zeros((SIZE, SIZE, SIZE))
for _k, (_i1, _j1) in enumerate(MONOMIALS):
    for _l, (_i2, _j2) in enumerate(MONOMIALS):
        _m = INDEX.get((_i1 + _i2, _j1 + _j2))
        if _m is not None:
            _PRODUCT[_m, _k, _l] = 1.0

AXES = {'x': 0, 'y': 1, 0: 0, 1: 1}


def _axis(axis):
    try:
        return AXES[axis]
    except (KeyError, TypeError):
        raise ValueError(f"Eixo inválido: {axis!r} (use 'x' ou 'y').")


class Jet3:
    """
    Expansão de Taylor truncada na ordem 3 em duas variáveis.

    `order` indica até que ordem os coeficientes são exatos: derivar um
    jato perde uma ordem (os coeficientes do topo passam a ser zero e
    deixam de valer).
    """

    __slots__ = ('t', 'order')
    __array_ufunc__ = None

    def __init__(self, taylor, order=ORDER):
        self.t = np.asarray(taylor, dtype=float)
        if self.t.shape[:1] != (SIZE,):
            raise ValueError(f"Um Jet3 precisa de {SIZE} coeficientes, recebeu forma {self.t.shape}.")
        self.order = order

    # construtores

    @classmethod
    def constant(cls, value):
        value = np.asarray(value, dtype=float)
        t = np.zeros((SIZE,) + value.shape)
        t[0] = value
        return cls(t)

    @classmethod
    def variable(cls, axis, value):
        jet = cls.constant(value)
        jet.t[1 + _axis(axis)] = 1.0
        return jet

    @classmethod
    def from_partials(cls, partials, order=ORDER):
        partials = np.asarray(partials, dtype=float)
        scale = _SCALE.reshape((SIZE,) + (1,) * (partials.ndim - 1))
        return cls(partials / scale, order)

    # acesso

    @property
    def shape(self):
        return self.t.shape[1:]

    @property
    def value(self):
        return self.t[0]

    @property
    def partials(self):
        """
        Coeficientes c[i][j] = d^i/dx^i d^j/dy^j f no ponto, na ordem de MONOMIALS.
        """
        scale = _SCALE.reshape((SIZE,) + (1,) * (self.t.ndim - 1))
        return self.t * scale

    def partial(self, i, j):
        k = INDEX[(i, j)]
        return self.t[k] * _SCALE[k]

    @property
    def gradient(self):
        return np.stack([self.partial(1, 0), self.partial(0, 1)])

    @property
    def hessian(self):
        xy = self.partial(1, 1)
        return np.stack([
            np.stack([self.partial(2, 0), xy]),
            np.stack([xy, self.partial(0, 2)]),
        ])

    def __getitem__(self, index):
        if not isinstance(index, tuple):
            index = (index,)
        return Jet3(self.t[(slice(None),) + index], self.order)

    def __repr__(self):
        return f"Jet3(value={self.value!r}, order={self.order})"

    # aritmética

    def _coerce(self, other):
        if isinstance(other, Jet3):
            return other
        value = np.asarray(other, dtype=float)
        # constantes ganham o lote do jato; (10,) não alinharia com (10, *lote)
        return Jet3.constant(np.broadcast_to(value, np.broadcast_shapes(value.shape, self.shape)))

    def __add__(self, other):
        other = self._coerce(other)
        return Jet3(self.t + other.t, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.t, self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            return Jet3(self.t * np.asarray(other, dtype=float), self.order)
        return jet_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet3):
            return Jet3(self.t / np.asarray(other, dtype=float), self.order)
        return jet_mul(self, power(other, -1))

    def __rtruediv__(self, other):
        return jet_mul(self._coerce(other), power(self, -1))

    def __pow__(self, p):
        return power(self, p)

    def diff(self, axis):
        """
        Derivada parcial como jato; exata até `order - 1`.
        """
        axis = _axis(axis)
        t = np.zeros_like(self.t)
        for k, (i, j) in enumerate(MONOMIALS):
            shifted = (i + 1, j) if axis == 0 else (i, j + 1)
            source = INDEX.get(shifted)
            if source is not None:
                t[k] = shifted[axis] * self.t[source]
        return Jet3(t, self.order - 1)


def jet_var(axis, value):
    """
    Semente da variável independente `axis` ('x' ou 'y') no valor dado.
    """
    return Jet3.variable(axis, value)


def jet_mul(a, b):
    """
    Produto de Leibniz truncado; termos de grau total acima de 3 são descartados.
    """
    t = np.einsum('mkl,k...,l...->m...', _PRODUCT, a.t, b.t)
    return Jet3(t, min(a.order, b.order))


# derivadas f, f', f'', f''' no valor central

def _sin(x):
    s, c = np.sin(x), np.cos(x)
    return s, c, -s, -c


def _cos(x):
    s, c = np.sin(x), np.cos(x)
    return c, -s, -c, s


# |cos| abaixo disto (de no máximo 1) conta como polo de tan
TAN_POLE = 1e-12


def _tan(x):
    c = np.cos(x)
    if np.any(np.abs(c) < TAN_POLE):
        raise DomainError("tan avaliada num polo (cos = 0).", reason=NEAR_SINGULAR)
    t = np.tan(x)
    s = 1.0 + t * t
    return t, s, 2.0 * t * s, s * (2.0 + 6.0 * t * t)


def _exp(x):
    e = np.exp(x)
    return e, e, e, e


def _log(x):
    if np.any(~(x > 0)):
        raise DomainError(
            f"log requer valor positivo ({np.count_nonzero(~(x > 0))} ponto(s) inválido(s)).",
            reason=LOG_DOMAIN,
        )
    inv = 1.0 / x
    return np.log(x), inv, -inv * inv, 2.0 * inv ** 3


def _atan(x):
    s = 1.0 / (1.0 + x * x)
    return np.arctan(x), s, -2.0 * x * s * s, (6.0 * x * x - 2.0) * s ** 3


def _sinh(x):
    s, c = np.sinh(x), np.cosh(x)
    return s, c, s, c


def _cosh(x):
    s, c = np.sinh(x), np.cosh(x)
    return c, s, c, s


def _arccosh(x):
    if np.any(~(x > 1)):
        raise DomainError("arccosh requer valor maior que 1.", reason=LOG_DOMAIN)
    q = x * x - 1.0
    r = np.sqrt(q)
    return np.arccosh(x), 1.0 / r, -x / (q * r), (2.0 * x * x + 1.0) / (q * q * r)


def _pow(p):
    integer = float(p).is_integer()

    def derivatives(x):
        if not integer and np.any(~(x > 0)):
            raise DomainError(
                f"potência real {p} requer base positiva.", reason=LOG_DOMAIN,
            )
        if integer and p < 0 and np.any(x == 0):
            raise DomainError("denominador singular (base nula).", reason=NEAR_SINGULAR)
        coefficients = (1.0, p, p * (p - 1), p * (p - 1) * (p - 2))
        return tuple(
            c * x ** (p - k) if c != 0 else np.zeros_like(x)
            for k, c in enumerate(coefficients)
        )

    return derivatives


UNARY = {
    'sin': _sin,
    'cos': _cos,
    'tan': _tan,
    'exp': _exp,
    'log': _log,
    'sqrt': _pow(0.5),
    'atan': _atan,
    'sinh': _sinh,
    'cosh': _cosh,
    'arccosh': _arccosh,
}


def compose(derivatives, a):
    """
    Composição de Faà di Bruno até a ordem 3 a partir de (f, f', f'', f''').
    """
    f0, f1, f2, f3 = derivatives
    delta = Jet3(a.t.copy(), a.order)
    delta.t[0] = 0.0
    delta2 = jet_mul(delta, delta)
    delta3 = jet_mul(delta2, delta)
    t = f1 * delta.t + (0.5 * f2) * delta2.t + (f3 / 6.0) * delta3.t
    t[0] = f0
    return Jet3(t, a.order)


def jet_unary(f, a, p=None):
    """
    Aplica uma função elementar a um jato.

    `f` é um nome de UNARY ou 'pow' (com o expoente real `p`).
    Levanta DomainError quando a pré-condição da função falha no valor central.
    """
    if f == 'pow':
        if p is None:
            raise ValueError("'pow' precisa do expoente p.")
        if p == 0:
            return Jet3.constant(np.ones(a.shape))
        derivatives = _pow(p)
    else:
        try:
            derivatives = UNARY[f]
        except KeyError:
            raise ValueError(f"Função de jato desconhecida: {f!r}")
    return compose(derivatives(a.value), a)


def sin(a):
    return jet_unary('sin', a)


def cos(a):
    return jet_unary('cos', a)


def tan(a):
    return jet_unary('tan', a)


def exp(a):
    return jet_unary('exp', a)


def log(a):
    return jet_unary('log', a)


def sqrt(a):
    return jet_unary('sqrt', a)


def atan(a):
    return jet_unary('atan', a)


def sinh(a):
    return jet_unary('sinh', a)


def cosh(a):
    return jet_unary('cosh', a)


def arccosh(a):
    return jet_unary('arccosh', a)


def power(a, p):
    if isinstance(a, Jet3):
        return jet_unary('pow', a, p)
    return np.asarray(a, dtype=float) ** p


def atan2(y, x):
    """
    Ângulo polar com ramo de np.arctan2 no valor central.

    Usa atan2(y, x) - atan2(y0, x0) = atan((x0 y - y0 x) / (x0 x + y0 y)),
    cujo denominador vale x0² + y0² > 0 perto do ponto.
    """
    x0, y0 = x.value, y.value
    if np.any(x0 * x0 + y0 * y0 == 0):
        raise DomainError("atan2 indefinido na origem.", reason=NEAR_SINGULAR)
    u = (x0 * y - y0 * x) / (x0 * x + y0 * y)
    theta = atan(u)
    theta.t[0] = np.arctan2(y0, x0)
    return theta


def jet_sum(jets):
    total = jets[0]
    for jet in jets[1:]:
        total = total + jet
    return total
