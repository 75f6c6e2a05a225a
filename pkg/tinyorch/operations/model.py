"""
AI models as ordered chains of layers.

Only shape and byte metadata are kept: no tensors, no weights.

.. autosummary::

    ~Footprint
    ~LayerKind
    ~LayerRange
    ~LayerSpec
    ~ModelDescriptor
    ~split_model
    ~validate_model
"""

import dataclasses
import enum
import functools
import itertools
import logging
import typing
from fractions import Fraction

from .misc import InvalidCut
from .misc import InvalidModel

logger = logging.getLogger(__name__)


class LayerKind(enum.Enum):
    """Kind of a model layer.  Passthrough layers model fused non-conv blocks."""

    CONV = "conv"
    FC = "fc"
    PASSTHROUGH = "passthrough"


class Footprint(typing.NamedTuple):
    """Accelerator memory used by a range of layers."""

    weight_bytes: int = 0
    bias_bytes: int = 0
    layers: int = 0

    def __add__(self, other):
        return Footprint(*(a + b for a, b in zip(self, other)))


class LayerRange(typing.NamedTuple):
    """Half-open range ``[start, stop)`` of layer indices."""

    start: int
    stop: int

    def __len__(self):
        return self.stop - self.start


@dataclasses.dataclass(frozen=True)
class LayerSpec:
    """
    One layer of a model.

    .. rubric:: Parameters

    * ``kind`` (LayerKind): conv, fully-connected, or passthrough.
    * ``k`` (int): Kernel size (convolutions only, otherwise 0).
    * ``in_shape`` ((int, int, int)): (H_in, W_in, C_in)
    * ``out_shape`` ((int, int, int)): (H_out, W_out, C_out)
    * ``weight_bytes`` (int): Weight memory of this layer.
    * ``bias_bytes`` (int): Bias memory of this layer.
    * ``out_bytes`` (int): Size of the output of this layer.
    """

    kind: LayerKind
    k: int
    in_shape: tuple
    out_shape: tuple
    weight_bytes: int
    bias_bytes: int
    out_bytes: int

    def _asdict(self):
        """Return the layer as a dictionary with the JSON field names."""
        h_in, w_in, c_in = self.in_shape
        h_out, w_out, c_out = self.out_shape
        # fmt: off
        return {
            "kind": self.kind.value, "k": self.k,
            "h_in": h_in, "w_in": w_in, "c_in": c_in,
            "h_out": h_out, "w_out": w_out, "c_out": c_out,
            "weight_bytes": self.weight_bytes,
            "bias_bytes": self.bias_bytes,
            "out_bytes": self.out_bytes,
        }
        # fmt: on

    @classmethod
    def _fromdict(cls, config):
        return cls(
            kind=LayerKind(config["kind"]),
            k=config.get("k", 0),
            in_shape=(config["h_in"], config["w_in"], config["c_in"]),
            out_shape=(config["h_out"], config["w_out"], config["c_out"]),
            weight_bytes=config.get("weight_bytes", 0),
            bias_bytes=config.get("bias_bytes", 0),
            out_bytes=config["out_bytes"],
        )


@dataclasses.dataclass(frozen=True)
class ModelDescriptor:
    """
    An AI model: input size and the ordered chain of its layers.

    .. rubric:: Parameters

    * ``name`` (str): Name of the model.
    * ``input_bytes`` (int): Size of the model input (In^size).
    * ``layers`` (tuple): :class:`LayerSpec` objects, in order.
    * ``size_bytes`` (int): Declared model size (optional).

    .. autosummary::

        ~_asdict
        ~_fromdict
        ~bytes_into
        ~footprint
        ~num_layers
    """

    name: str
    input_bytes: int
    layers: tuple
    size_bytes: typing.Optional[int] = None

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name!r}, L={self.num_layers})"

    @property
    def num_layers(self) -> int:
        """Number of layers (L)."""
        return len(self.layers)

    @property
    def weight_bytes(self) -> int:
        return sum(layer.weight_bytes for layer in self.layers)

    @property
    def input_shape(self):
        return self.layers[0].in_shape

    @property
    def data_intensity(self) -> Fraction:
        """Mean size of the model input and every layer output, bytes (exact)."""
        total = self.input_bytes + sum(layer.out_bytes for layer in self.layers)
        return Fraction(total, self.num_layers + 1)

    def bytes_into(self, index: int) -> int:
        """Size of the data fed to layer ``index`` (layer 0 gets the model input)."""
        if index == 0:
            return self.input_bytes
        return self.layers[index - 1].out_bytes

    @functools.cached_property
    def _prefix(self):
        # running totals of (weight, bias) over layers, with a leading zero
        weights = [0, *itertools.accumulate(layer.weight_bytes for layer in self.layers)]
        biases = [0, *itertools.accumulate(layer.bias_bytes for layer in self.layers)]
        return weights, biases

    def footprint(self, start: int, stop: int) -> Footprint:
        """Accelerator memory used by layers ``[start, stop)``."""
        weights, biases = self._prefix
        return Footprint(weights[stop] - weights[start], biases[stop] - biases[start], stop - start)

    def _asdict(self):
        config = {"name": self.name, "input_bytes": self.input_bytes}
        if self.size_bytes is not None:
            config["size_bytes"] = self.size_bytes
        config["layers"] = [layer._asdict() for layer in self.layers]
        return config

    @classmethod
    def _fromdict(cls, config):
        """Create a validated model from a (JSON) dictionary."""
        layers = []
        for index, entry in enumerate(config.get("layers", [])):
            try:
                layers.append(LayerSpec._fromdict(entry))
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidModel(index, f"Cannot parse {entry!r}: {exc}") from exc
        try:
            model = cls(
                name=config["name"],
                input_bytes=config["input_bytes"],
                layers=tuple(layers),
                size_bytes=config.get("size_bytes"),
            )
        except KeyError as exc:
            raise InvalidModel(None, f"Missing key {exc}.") from exc
        return validate_model(model)


def validate_model(descriptor: ModelDescriptor) -> ModelDescriptor:
    """
    Return ``descriptor`` if all invariants hold.

    Layer ``l + 1`` must consume the output shape of layer ``l`` unless it
    is a passthrough layer, which declares its own reshape.  Raises
    :class:`~tinyorch.operations.misc.InvalidModel` with the layer index.
    """
    if descriptor.num_layers == 0:
        raise InvalidModel(0, f"Model {descriptor.name!r} has no layers.")
    if not isinstance(descriptor.input_bytes, int) or descriptor.input_bytes <= 0:
        raise InvalidModel(0, f"Model {descriptor.name!r} input_bytes must be positive.")

    for index, layer in enumerate(descriptor.layers):
        if min(layer.in_shape + layer.out_shape) < 1:
            raise InvalidModel(index, "All shape components must be >= 1.")
        if layer.kind == LayerKind.CONV and layer.k < 1:
            raise InvalidModel(index, "Convolution kernel must be >= 1.")
        if layer.out_bytes <= 0:
            raise InvalidModel(index, "out_bytes must be positive.")
        if layer.weight_bytes < 0 or layer.bias_bytes < 0:
            raise InvalidModel(index, "Weight and bias bytes must not be negative.")
        if layer.kind == LayerKind.PASSTHROUGH and (layer.weight_bytes or layer.bias_bytes):
            raise InvalidModel(index, "Passthrough layers have no weight or bias.")
        if index > 0 and layer.kind != LayerKind.PASSTHROUGH:
            previous = descriptor.layers[index - 1]
            if layer.in_shape != previous.out_shape:
                raise InvalidModel(
                    index,
                    f"Input shape {layer.in_shape} does not match"
                    f" output shape {previous.out_shape} of layer {index - 1}.",
                )

    if descriptor.size_bytes is not None and descriptor.weight_bytes != descriptor.size_bytes:
        raise InvalidModel(
            None,
            f"Model {descriptor.name!r} weights sum to {descriptor.weight_bytes}"
            f" bytes, declared size is {descriptor.size_bytes}.",
        )
    logger.debug("valid model %r", descriptor)
    return descriptor


def split_model(model: ModelDescriptor, cut_points) -> list:
    """
    Split ``model`` into contiguous chunks at the given layer indices.

    ``cut_points`` must be strictly increasing and inside ``(0, L)``.
    Returns a list of :class:`LayerRange` covering ``[0, L)``.
    """
    cuts = list(cut_points)
    L = model.num_layers
    for i, cut in enumerate(cuts):
        if not isinstance(cut, int) or not 0 < cut < L:
            raise InvalidCut(f"Cut point {cut!r} is outside (0, {L}).")
        if i > 0 and cut <= cuts[i - 1]:
            raise InvalidCut(f"Cut points must be strictly increasing, received {cuts!r}.")
    bounds = [0, *cuts, L]
    return [LayerRange(a, b) for a, b in itertools.pairwise(bounds)]
