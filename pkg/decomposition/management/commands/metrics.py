import json

from decomposition.metrics import SSIM_WINDOW, psnr, relative_error, ssim
from decomposition.management.base import VbiCommand
from decomposition.tensor_io import read_tensor, to_jsonable


def compare(ref, test, peak=None) -> dict:
    """err_rel and PSNR for any pair; SSIM too when both are h x w x 3 images"""
    if peak is None:
        peak = float(abs(ref.data).max())
    scores = {
        'err_rel': relative_error(ref, test),
        'psnr': psnr(ref, test, peak=peak),
    }
    n1, n2, n3 = ref.dims
    if n3 == 3 and min(n1, n2) >= SSIM_WINDOW:
        scores['ssim'] = ssim(ref.data, test.data, peak)
    return scores


class Command(VbiCommand):
    help = 'Compare two TNS3 tensors: relative error, PSNR and (for RGB images) SSIM as JSON'

    config_types = {
        'ref': str,
        'test': str,
        'psnr_peak': float,
    }

    def add_arguments(self, parser):
        parser.add_argument('--ref', help='Reference tensor (.tns3)')
        parser.add_argument('--test', help='Tensor to score (.tns3)')
        parser.add_argument('--psnr-peak', type=float, help='PSNR/SSIM peak value (default max|ref|)')
        parser.add_argument('--config', help='key=value file supplying any long option')

    def run(self, options):
        ref = read_tensor(self.resolve_required('ref'))
        test = read_tensor(self.resolve_required('test'))
        scores = compare(ref, test, self.resolve('psnr_peak'))
        self.stdout.write(json.dumps(to_jsonable(scores), sort_keys=True))
