"""
Hierarquia de erros da biblioteca numérica.

Os erros que marcam um ponto de amostragem como inutilizável carregam um
código de motivo (`reason`) legível por máquina, usado nos relatórios.
"""

RHO_NONPOSITIVE = 'RHO_NONPOSITIVE'
LOG_DOMAIN = 'LOG_DOMAIN'
NEAR_SINGULAR = 'NEAR_SINGULAR'
INADMISSIBLE = 'INADMISSIBLE'

REASON_CODES = (RHO_NONPOSITIVE, LOG_DOMAIN, NEAR_SINGULAR, INADMISSIBLE)


class RicciFlatError(Exception):
    reason = None

    def __init__(self, message='', reason=None):
        super().__init__(message)
        if reason is not None:
            self.reason = reason


class DomainError(RicciFlatError):
    """
    Pré-condição de uma operação de jato violada (log, sqrt ou potência de
    valor inválido, polo da tangente, denominador nulo).
    """
    reason = LOG_DOMAIN


class InadmissiblePoint(DomainError):
    reason = INADMISSIBLE


class SingularMetric(RicciFlatError):
    reason = NEAR_SINGULAR


class SolverError(RicciFlatError):
    pass


class NoConvergence(SolverError):
    """
    Orçamento de iterações esgotado. Guarda o histórico de resíduos e a
    última iteração para que o chamador ainda possa gravar o resultado.
    """

    def __init__(self, message, history=None, solution=None):
        super().__init__(message)
        self.history = list(history or [])
        self.solution = solution


class SingularJacobian(SolverError):
    reason = RHO_NONPOSITIVE


class TooCloseToBoundary(RicciFlatError):
    pass


class ConfigurationError(RicciFlatError, ValueError):
    pass
