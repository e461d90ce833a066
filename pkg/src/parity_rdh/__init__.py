"""Reversible data hiding in 8-bit grayscale images with horizontal/vertical parity pairs."""

from .bit_io import BitStream, decode_envelope, encode_envelope
from .errors import StegoError
from .image_core import GrayImage, decode_pgm, encode_pgm, read_pgm, write_pgm
from .layer import TransportMode, embed_layer, extract_layer
from .metrics import mse, psnr
from .pipeline import capacity_probe, embed_multilayer, extract_multilayer

__version__ = "0.1.0"
