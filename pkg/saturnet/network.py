"""
Evaluate sigmoid networks.
"""


from typing import Optional, Union

import numpy as np

from .constants import SIGMOID_ACTIVATION
from .domain import LabelEncoding, SigmoidNetwork
from .errors import DimensionMismatch, NonOneHotEncoding


def sigmoid(t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Compute logistic function `1 / (1 + exp(-t))` without overflow.

    For negative inputs, the equivalent form `exp(t) / (1 + exp(t))` is used,
    so `exp` is never evaluated at a positive argument. NaN inputs produce NaN outputs.

    :param t:
        a number or an array of numbers
    :return:
        values from the closed interval [0, 1]
        (bounds are reached only when the exact value is not representable)
    """
    values = np.atleast_1d(np.asarray(t, dtype=float))
    result = np.empty_like(values)
    non_negative = values >= 0
    result[non_negative] = 1 / (1 + np.exp(-values[non_negative]))
    exp_values = np.exp(values[~non_negative])
    result[~non_negative] = exp_values / (1 + exp_values)
    if np.ndim(t) == 0:
        return float(result[0])
    return result.reshape(np.shape(t))


def forward_layers(network: SigmoidNetwork, x: np.ndarray) -> list[np.ndarray]:
    """
    Pass an input through a network and collect outputs of all its layers.

    :param network:
        network
    :param x:
        input vector
    :return:
        outputs of layers in their order (the last one is the output of the network)
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (network.input_dim,):
        raise DimensionMismatch(
            f"Network expects input of length {network.input_dim}, got shape {x.shape}."
        )
    outputs = []
    for layer in network.layers:
        x = layer.weights @ x + layer.biases
        if layer.activation == SIGMOID_ACTIVATION:
            x = sigmoid(x)
        outputs.append(x)
    return outputs


def forward(network: SigmoidNetwork, x: np.ndarray) -> np.ndarray:
    """
    Compute output of a network.

    :param network:
        network
    :param x:
        input vector
    :return:
        output vector
    """
    return forward_layers(network, x)[-1]


def classify(network: SigmoidNetwork, encoding: LabelEncoding, x: np.ndarray) -> int:
    """
    Predict label as the index of the largest output (ties go to the smallest label).

    :param network:
        network with one output per class
    :param encoding:
        one-hot encoding of labels
    :param x:
        input vector
    :return:
        label from `[1:c]`
    """
    if not encoding.is_one_hot:
        raise NonOneHotEncoding("Classification by the largest output requires one-hot encoding.")
    if network.output_dim != encoding.num_classes:
        raise DimensionMismatch(
            f"Network has {network.output_dim} outputs, but there are "
            f"{encoding.num_classes} classes."
        )
    return decode_output(encoding, forward(network, x))


def decode_output(encoding: LabelEncoding, output: np.ndarray) -> int:
    """
    Find label whose code is the closest to an output vector.

    For one-hot encoding, it is the index of the largest output (ties go to the smallest label).

    :param encoding:
        encoding of labels
    :param output:
        output of a network
    :return:
        label from `[1:c]`
    """
    if encoding.is_one_hot:
        return int(np.argmax(output)) + 1
    distances = np.linalg.norm(encoding.codes - output, axis=1)
    return int(np.argmin(distances)) + 1


def infer_scaling(network: SigmoidNetwork) -> Optional[float]:
    """
    Read scaling factor of the last sigmoid layer of a constructed network.

    Rows of such layers are a unit projection vector multiplied by the scaling factor,
    so the norm of any row equals the factor.

    :param network:
        constructed network
    :return:
        scaling factor or `None` if there are no sigmoid layers
    """
    sigmoid_layers = [x for x in network.layers if x.activation == SIGMOID_ACTIVATION]
    if not sigmoid_layers:
        return None
    return float(np.linalg.norm(sigmoid_layers[-1].weights[0]))
