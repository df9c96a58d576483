"""Eccezioni del pacchetto, con il codice di uscita usato dalla CLI."""


class StableLDPError(Exception):
    """Errore base: per default e' un fallimento numerico."""

    exit_code = 3


class DomainError(StableLDPError, ValueError):
    exit_code = 2


class FormatError(StableLDPError, ValueError):
    exit_code = 2


class FunctionalError(StableLDPError, ValueError):
    exit_code = 2


class UnsupportedFunctionalError(FunctionalError):
    pass


class QuadratureError(StableLDPError, ArithmeticError):
    """Quadratura non convergente; `abserr` e' la stima d'errore raggiunta."""

    def __init__(self, message, abserr=None):
        super().__init__(message)
        self.abserr = abserr


class CoverageError(StableLDPError, ArithmeticError):
    def __init__(self, message, uncovered=None):
        super().__init__(message)
        self.uncovered = uncovered


class FitError(StableLDPError):
    pass


class ValidationFailure(StableLDPError):
    """Un test statistico di validazione non e' passato."""

    exit_code = 1
