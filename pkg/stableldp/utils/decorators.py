import logging
from functools import wraps

import click

from stableldp.errors import StableLDPError

logger = logging.getLogger(__name__)


def command_errors(operation):
    """Converte le eccezioni del pacchetto nel codice di uscita del comando.

    Gli errori di click (flag mancanti o non validi) restano a click, che esce con 2.
    """
    def decorator(f):
        @wraps(f)
        def decorated_function(*args, **kwargs):
            try:
                return f(*args, **kwargs)
            except click.ClickException:
                raise
            except StableLDPError as e:
                logger.error(f"{operation} fallito: {e}")
                click.echo(f"errore in {operation}: {e}", err=True)
                click.get_current_context().exit(e.exit_code)
        return decorated_function
    return decorator


def require_seed(run_config):
    """I comandi randomizzati non partono senza seed esplicito (flag o file)."""
    if run_config.seed is None:
        raise click.UsageError(f"{run_config.command}: --seed e' obbligatorio per la riproducibilita'")
    return run_config.seed
