"""
Management command to convert between video frames and grayscale TNS3 stacks.

    pack    frames/*.png -> height x width x T stack for `decompose --preset background`
    unpack  decomposed L (background) or |S| (foreground) stack -> frames
"""
import logging
from pathlib import Path

import numpy as np
from django.core.management.base import CommandError

from decomposition.management.base import EXIT_USAGE, VbiCommand
from decomposition.tensor_io import load_frames, read_tensor, save_frames, write_tensor
from decomposition.tensor_types import Tensor3

logger = logging.getLogger(__name__)


class Command(VbiCommand):
    help = 'Pack image frames into a grayscale TNS3 stack, or unpack a stack into frames'

    config_types = {
        'input': str,
        'out': str,
        'pattern': str,
        'magnitude': bool,
        'prefix': str,
        'format': str,
    }

    def add_arguments(self, parser):
        parser.add_argument('action', choices=('pack', 'unpack'))
        parser.add_argument('--input', help='pack: frame directory; unpack: stack (.tns3)')
        parser.add_argument('--out', help='pack: stack path (.tns3); unpack: frame directory')
        parser.add_argument('--pattern', help="pack: glob for frame files (default '*.png')")
        parser.add_argument(
            '--magnitude',
            action='store_true',
            default=None,
            help='unpack: write |values| (foreground masks from a sparse part)',
        )
        parser.add_argument('--prefix', help="unpack: frame filename prefix (default 'frame')")
        parser.add_argument('--format', choices=('png', 'ppm'), help='unpack: frame image type (default png)')
        parser.add_argument('--config', help='key=value file supplying any long option')

    def run(self, options):
        input_path = self.resolve_required('input')
        out_path = self.resolve_required('out')
        if options['action'] == 'pack':
            self.pack(Path(input_path), out_path)
        else:
            self.unpack(input_path, out_path)

    def pack(self, frame_dir: Path, out_path):
        if not frame_dir.is_dir():
            raise CommandError(f"{frame_dir} is not a directory", returncode=EXIT_USAGE)
        paths = sorted(frame_dir.glob(self.resolve('pattern', '*.png')))
        if not paths:
            raise CommandError(f"No frames in {frame_dir} match '{self.resolve('pattern', '*.png')}'",
                               returncode=EXIT_USAGE)
        stack = load_frames(paths)
        write_tensor(out_path, stack)
        n1, n2, n3 = stack.dims
        self.stdout.write(self.style.SUCCESS(f"Packed {n3} frames of {n1}x{n2} into {out_path}"))

    def unpack(self, stack_path, out_dir):
        stack = read_tensor(stack_path)
        if self.resolve('magnitude', False):
            stack = Tensor3(np.abs(stack.data))
        written = save_frames(
            out_dir,
            stack,
            prefix=self.resolve('prefix', 'frame'),
            fmt=self.resolve('format', 'png'),
        )
        logger.debug(f"Frames written: {written}")
        self.stdout.write(self.style.SUCCESS(f"Wrote {len(written)} frames to {out_dir}"))
