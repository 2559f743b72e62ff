import logging

from django.core.management.base import CommandError

from decomposition.exceptions import DegenerateScale
from decomposition.management.base import EXIT_USAGE, VbiCommand
from decomposition.tensor_io import read_tensor, write_tensor, write_trace
from decomposition import vbi_solver

logger = logging.getLogger(__name__)


class Command(VbiCommand):
    help = 'Decompose a TNS3 tensor into low-rank (L) and sparse (S) parts'

    config_types = {
        'input': str,
        'out_l': str,
        'out_s': str,
        'trace': str,
        'trace_format': str,
    }

    def add_arguments(self, parser):
        parser.add_argument('--input', help='Observed tensor X (.tns3)')
        parser.add_argument('--out-l', help='Output path for the low-rank part')
        parser.add_argument('--out-s', help='Output path for the sparse part')
        parser.add_argument('--trace', help='Write the per-iteration trace to this file')
        parser.add_argument('--trace-format', choices=('csv', 'json'), help='Trace format (default csv)')
        self.add_solver_arguments(parser)
        self.add_config_arguments(parser)

    def run(self, options):
        input_path = self.resolve_required('input')
        out_l = self.resolve_required('out_l')
        out_s = self.resolve_required('out_s')
        trace_path = self.resolve('trace')
        trace_format = self.resolve('trace_format', 'csv')
        if trace_format not in ('csv', 'json'):
            raise CommandError(f"Unknown trace format '{trace_format}'", returncode=EXIT_USAGE)

        cfg = self.solver_config(trace_enabled=True)
        x = read_tensor(input_path)
        logger.info(f"Decomposing {input_path} ({'x'.join(map(str, x.dims))}) with {self.resolve('method', 'tnn')}")

        try:
            result = vbi_solver.run(x, cfg)
        except DegenerateScale as exc:
            if trace_path:
                write_trace(trace_path, exc.trace, trace_format)
            raise

        write_tensor(out_l, result.l)
        write_tensor(out_s, result.s)
        if trace_path:
            write_trace(trace_path, result.trace, trace_format)
        self.run_log.log_solve(input_path, result)
        self.stdout.write(self.style.SUCCESS(self.summary_line('decompose', result)))
