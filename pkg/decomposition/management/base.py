"""
Shared plumbing for the decomposition management commands: the exit-code
contract, ``--config`` / ``--preset`` resolution and solver flags.

Exit codes: 0 success, 1 usage or I/O errors, 2 numerical degeneracy.
"""
import logging
import sys

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from decomposition.exceptions import DecompositionError, DegenerateScale
from decomposition.run_logger import RunLogger
from decomposition.vbi_solver import SolverConfig

logger = logging.getLogger('decomposition.management')

EXIT_USAGE = 1
EXIT_DEGENERATE = 2

METHODS = ('tnn', 'pstnn')


def parse_config_file(path) -> dict:
    """Read ``key=value`` lines; ``#`` starts a comment, ``-`` and ``_`` are interchangeable in keys"""
    values = {}
    try:
        with open(path, encoding='utf-8') as f:
            lines = f.readlines()
    except OSError as exc:
        raise CommandError(f"Cannot read config file {path}: {exc}", returncode=EXIT_USAGE)
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise CommandError(f"{path}:{lineno}: expected key=value, got '{line}'", returncode=EXIT_USAGE)
        key, value = line.split('=', 1)
        values[key.strip().lstrip('-').replace('-', '_')] = value.strip()
    return values


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


class VbiCommand(BaseCommand):
    """Base class: subclasses implement ``run(options)`` instead of ``handle``"""

    # Preset applied when --preset is not given
    default_preset = None
    # Option names that --config may supply, with their types
    config_types = {}

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        # Parse errors raise CommandError (exit 1) instead of argparse's exit 2
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as e:
            self.stderr.write(f"{e.__class__.__name__}: {e}")
            sys.exit(e.returncode)

    # ---------------------
    # Arguments
    # ---------------------
    def add_config_arguments(self, parser):
        parser.add_argument('--config', help='key=value file supplying any long option')
        parser.add_argument(
            '--preset',
            choices=sorted(settings.VBI_PRESETS),
            help='Named defaults for method, truncation and initial theta',
        )

    def add_solver_arguments(self, parser, method_list=False):
        if method_list:
            parser.add_argument('--method', help='Comma-separated low-rank priors, e.g. tnn,pstnn')
        else:
            parser.add_argument('--method', choices=METHODS, help='Low-rank prior: tnn or pstnn (weighted)')
        parser.add_argument('--k-trunc', type=int, help='PSTNN truncation: singular values left unpenalized')
        parser.add_argument('--theta1', type=float, help='Initial noise precision')
        parser.add_argument('--theta2', type=float, help='Initial sparsity weight')
        parser.add_argument('--theta3', type=float, help='Initial low-rank weight')
        parser.add_argument('--max-iters', type=int, help=f'Iteration cap (default {settings.VBI_MAX_ITERS})')
        parser.add_argument('--tol', type=float, help=f'RMSE stopping tolerance (default {settings.VBI_RMSE_TOL})')
        parser.add_argument(
            '--sigma-s-convention',
            choices=('derivation', 'algorithm1'),
            help='Variance formula of q(S)',
        )

    solver_config_types = {
        'method': str,
        'k_trunc': int,
        'theta1': float,
        'theta2': float,
        'theta3': float,
        'max_iters': int,
        'tol': float,
        'sigma_s_convention': str,
    }

    # ---------------------
    # Option resolution
    # ---------------------
    def handle(self, *args, **options):
        self.options = options
        self.file_config = parse_config_file(options['config']) if options.get('config') else {}
        preset_name = options.get('preset') or self.file_config.get('preset') or self.default_preset
        if preset_name and preset_name not in settings.VBI_PRESETS:
            raise CommandError(f"Unknown preset '{preset_name}'", returncode=EXIT_USAGE)
        self.preset = dict(settings.VBI_PRESETS.get(preset_name, {})) if preset_name else {}

        known = {**self.solver_config_types, **self.config_types, 'preset': str}
        unknown = set(self.file_config) - set(known)
        if unknown:
            raise CommandError(f"Unknown config keys: {', '.join(sorted(unknown))}", returncode=EXIT_USAGE)

        self.run_log = RunLogger(self.command_name(), options)
        try:
            self.run(options)
        except DegenerateScale as exc:
            self.run_log.log_error(exc)
            raise CommandError(f"Degenerate scale: {exc}", returncode=EXIT_DEGENERATE)
        except (DecompositionError, ValueError) as exc:
            self.run_log.log_error(exc)
            raise CommandError(str(exc), returncode=EXIT_USAGE)
        except CommandError as exc:
            self.run_log.log_error(exc)
            raise
        finally:
            path = self.run_log.save()
            if path:
                logger.info(f"Run log saved to {path}")

    def command_name(self) -> str:
        return self.__class__.__module__.rsplit('.', 1)[-1]

    def run(self, options):
        raise NotImplementedError('subclasses of VbiCommand must provide a run() method')

    def resolve(self, name, default=None):
        """Explicit flag > --config file > preset > default"""
        value = self.options.get(name)
        if value is not None:
            return value
        if name in self.file_config:
            cast = {**self.solver_config_types, **self.config_types}.get(name, str)
            raw = self.file_config[name]
            try:
                return _as_bool(raw) if cast is bool else cast(raw)
            except ValueError:
                raise CommandError(f"Config value for '{name}' is not a valid {cast.__name__}: '{raw}'",
                                   returncode=EXIT_USAGE)
        if name in self.preset:
            return self.preset[name]
        return default

    def resolve_required(self, name):
        value = self.resolve(name)
        if value is None:
            raise CommandError(f"--{name.replace('_', '-')} is required", returncode=EXIT_USAGE)
        return value

    def resolve_theta(self):
        default = self.preset.get('theta', settings.VBI_THETA_INIT)
        if len(default) != 3:
            raise CommandError(f"Initial theta needs three entries, got {default}", returncode=EXIT_USAGE)
        return tuple(
            float(self.resolve(f'theta{i + 1}', default[i]))
            for i in range(3)
        )

    def solver_config(self, method=None, trace_enabled=True) -> SolverConfig:
        """SolverConfig for one method name ('tnn' or 'pstnn') from the resolved options"""
        method = method or self.resolve('method', 'tnn')
        if method not in METHODS:
            raise CommandError(f"Unknown method '{method}' (choose from {', '.join(METHODS)})",
                               returncode=EXIT_USAGE)
        kwargs = {
            'theta_init': self.resolve_theta(),
            'max_iters': self.resolve('max_iters', settings.VBI_MAX_ITERS),
            'rmse_tol': self.resolve('tol', settings.VBI_RMSE_TOL),
            'sigma_s_convention': self.resolve('sigma_s_convention', settings.VBI_SIGMA_S_CONVENTION),
            'trace_enabled': trace_enabled,
        }
        if method == 'pstnn':
            k_trunc = self.resolve('k_trunc')
            if k_trunc is None:
                raise CommandError("--method pstnn requires --k-trunc", returncode=EXIT_USAGE)
            kwargs.update(method='weighted', k_trunc=k_trunc)
        return SolverConfig.build(**kwargs)

    def summary_line(self, label, result) -> str:
        state = result.state
        last = result.trace[-1] if result.trace else None
        rmse = f"rmse_l={last.rmse_l:.3e} rmse_s={last.rmse_s:.3e}" if last else "rmse_l=0 rmse_s=0"
        theta = ', '.join(f"{t:.6g}" for t in state.e_theta)
        status = 'converged' if state.converged else 'max-iters'
        return f"{label}: iters={state.iter} ({status}) theta=({theta}) {rmse} tubal_rank={state.l_factors.r}"
