"""Minimal dense networks used by the actor-critic agents.

Everything is plain numpy: forward passes cache activations, backward
passes return parameter gradients by hand-rolled reverse accumulation, and
Adam keeps its moment estimates in matching lists. Hidden layers are tanh;
the output is tanh for actors (bounded actions) and linear for critics.
"""

from __future__ import annotations

import numpy as np

HIDDEN_ACTIVATION = "tanh"
OUTPUT_ACTIVATIONS = ("tanh", "linear")


class Mlp:
    """Fully connected network with tanh hidden layers.

    Parameters are W[i] of shape (fan_out, fan_in) and b[i] of shape
    (fan_out,), initialized uniformly in +-1/sqrt(fan_in). For actors the
    final layer is additionally scaled down so the initial policy stays
    near the center of the action box.
    """

    def __init__(
        self,
        dims: list[int],
        output_activation: str = "linear",
        rng: np.random.Generator | None = None,
        final_layer_scale: float = 1.0,
    ) -> None:
        if len(dims) < 2:
            raise ValueError("need at least an input and an output dimension")
        if any(int(d) != d or d < 1 for d in dims):
            raise ValueError("all layer widths must be positive integers")
        if output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")
        if rng is None:
            rng = np.random.default_rng()
        self.dims = [int(d) for d in dims]
        self.output_activation = output_activation
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for i in range(len(self.dims) - 1):
            fan_in = self.dims[i]
            fan_out = self.dims[i + 1]
            bound = 1.0 / np.sqrt(fan_in)
            if i == len(self.dims) - 2:
                bound *= final_layer_scale
            self.weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            self.biases.append(rng.uniform(-bound, bound, size=fan_out))

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def parameters(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Batch forward pass; returns the output and the activation cache.

        The cache holds the input followed by every layer's post-activation
        output, which is all backward() needs since tanh' = 1 - tanh^2.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dims[0]:
            raise ValueError(f"expected input width {self.dims[0]}, got {x.shape[1]}")
        cache = [x]
        a = x
        for i in range(self.num_layers):
            z = a @ self.weights[i].T + self.biases[i]
            if i < self.num_layers - 1 or self.output_activation == "tanh":
                a = np.tanh(z)
            else:
                a = z
            cache.append(a)
        return a, cache

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(
        self, cache: list[np.ndarray], grad_output: np.ndarray
    ) -> tuple[list[np.ndarray], np.ndarray]:
        """Reverse pass from d(loss)/d(output); no batch averaging is applied.

        Returns gradients ordered like parameters() plus the gradient with
        respect to the network input (used to push critic gradients through
        the action when training the actor).
        """
        grad_output = np.atleast_2d(np.asarray(grad_output, dtype=float))
        weight_grads: list[np.ndarray] = [np.empty(0)] * self.num_layers
        bias_grads: list[np.ndarray] = [np.empty(0)] * self.num_layers
        if self.output_activation == "tanh":
            delta = grad_output * (1.0 - cache[-1] ** 2)
        else:
            delta = grad_output
        for i in range(self.num_layers - 1, -1, -1):
            weight_grads[i] = delta.T @ cache[i]
            bias_grads[i] = delta.sum(axis=0)
            grad_input = delta @ self.weights[i]
            if i > 0:
                delta = grad_input * (1.0 - cache[i] ** 2)
        return weight_grads + bias_grads, grad_input

    def copy(self) -> "Mlp":
        """Structural clone with the same parameter values (for targets)."""
        twin = Mlp.__new__(Mlp)
        twin.dims = list(self.dims)
        twin.output_activation = self.output_activation
        twin.weights = [w.copy() for w in self.weights]
        twin.biases = [b.copy() for b in self.biases]
        return twin

    def state_dict(self) -> dict[str, np.ndarray]:
        state: dict[str, np.ndarray] = {
            "dims": np.array(self.dims),
            "output_activation": np.array(self.output_activation),
        }
        for i in range(self.num_layers):
            state[f"w{i}"] = self.weights[i]
            state[f"b{i}"] = self.biases[i]
        return state

    @classmethod
    def from_state_dict(cls, state: dict[str, np.ndarray]) -> "Mlp":
        net = cls.__new__(cls)
        net.dims = [int(d) for d in state["dims"]]
        net.output_activation = str(state["output_activation"])
        net.weights = []
        net.biases = []
        for i in range(len(net.dims) - 1):
            net.weights.append(np.array(state[f"w{i}"], dtype=float))
            net.biases.append(np.array(state[f"b{i}"], dtype=float))
        return net


class Adam:
    """Adam with bias correction, operating on a fixed list of arrays."""

    def __init__(
        self,
        params: list[np.ndarray],
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> None:
        if learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        self.params = params
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step_count = 0
        self.first_moment = [np.zeros_like(p) for p in params]
        self.second_moment = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        if len(grads) != len(self.params):
            raise ValueError("gradient list does not match parameter list")
        for g in grads:
            if not np.all(np.isfinite(g)):
                raise FloatingPointError(
                    "non-finite gradient; parameters left unchanged"
                )
        self.step_count += 1
        correction1 = 1.0 - self.beta1**self.step_count
        correction2 = 1.0 - self.beta2**self.step_count
        for p, g, m, v in zip(self.params, grads, self.first_moment, self.second_moment):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g**2
            m_hat = m / correction1
            v_hat = v / correction2
            p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)


def soft_update(target: Mlp, source: Mlp, tau: float) -> None:
    """Polyak averaging: target <- tau * source + (1 - tau) * target."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must be in [0, 1]")
    for t, s in zip(target.parameters(), source.parameters()):
        t *= 1.0 - tau
        t += tau * s


def save_networks(path, networks: dict[str, Mlp]) -> None:
    """Checkpoint several networks into one npz file, keys prefixed by name."""
    flat: dict[str, np.ndarray] = {"names": np.array(sorted(networks))}
    for name in networks:
        for key, value in networks[name].state_dict().items():
            flat[f"{name}/{key}"] = value
    np.savez(path, **flat)


def load_networks(path) -> dict[str, Mlp]:
    with np.load(path, allow_pickle=False) as data:
        names = [str(n) for n in data["names"]]
        out = {}
        for name in names:
            prefix = f"{name}/"
            state = {
                key[len(prefix):]: data[key] for key in data.files if key.startswith(prefix)
            }
            out[name] = Mlp.from_state_dict(state)
    return out


def chain_multiplications(dims: list[int]) -> int:
    """Multiply count of one forward pass through a dense chain."""
    return int(sum(dims[i] * dims[i + 1] for i in range(len(dims) - 1)))


def complexity_estimate(
    actor_dims: list[int], critic_dims: list[int], total_steps: int
) -> int:
    """Leading-order multiply count of a training run.

    Each transition costs one actor pass and two critic passes (twin
    critics), so the count is total_steps * (actor chain + 2 * critic chain).
    """
    return total_steps * (
        chain_multiplications(actor_dims) + 2 * chain_multiplications(critic_dims)
    )
