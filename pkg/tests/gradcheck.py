"""Shared central-finite-difference gradient checker for graph tests."""
import numpy as np

from wqnet.neuralnet import Mode, backward, forward, infer_shapes, init_network
from wqnet.training import cross_entropy_loss


def fd_worst_error(graph, seed, loss_kind="mse", coords_per_tensor=4, input_coords=5, h=1e-6):
    """Sampled central-difference check; returns the worst relative error.

    The forward pass runs in TRAIN mode with a fixed dropout seed, so the
    loss is a deterministic differentiable function of parameters and input.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    params = init_network(graph, seed)
    n = 3
    x = rng.normal(size=(n, graph.input_dim))
    out_shape = infer_shapes(graph)[graph.output_id]
    if loss_kind == "ce":
        target = rng.integers(0, out_shape[0], size=n)
    else:
        target = rng.normal(size=(n,) + out_shape)

    def loss_value():
        out, _ = forward(graph, params, x, Mode.TRAIN, seed=7)
        if loss_kind == "ce":
            return cross_entropy_loss(out, target)[0]
        return float(np.mean((out - target) ** 2))

    out, cache = forward(graph, params, x, Mode.TRAIN, seed=7)
    if loss_kind == "ce":
        _, g = cross_entropy_loss(out, target)
        dx = backward(graph, params, cache, g, at_output_preactivation=True)
    else:
        g = 2.0 * (out - target) / out.size
        dx = backward(graph, params, cache, g)

    worst = 0.0
    tensors = [(params.grads[nid][name], t) for nid, name, t in params.named_tensors()]
    tensors.append((dx, x))
    for grad, arr in tensors:
        flat = arr.reshape(-1)
        n_coords = input_coords if arr is x else coords_per_tensor
        for _ in range(n_coords):
            i = int(rng.integers(0, flat.size))
            orig = flat[i]
            flat[i] = orig + h
            up = loss_value()
            flat[i] = orig - h
            down = loss_value()
            flat[i] = orig
            num = (up - down) / (2 * h)
            a = grad.reshape(-1)[i]
            if abs(a - num) < 1e-8:
                continue  # below the resolution of (lp - lm)/2h in float64
            worst = max(worst, abs(a - num) / max(abs(a), abs(num)))
    return worst
