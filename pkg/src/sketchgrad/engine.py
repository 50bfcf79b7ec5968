"""The training loop: sample programs, score them, step the distributions.

One iteration samples a population of hole assignments from the current
per-hole distributions, instantiates and scores each candidate against the
specification, standardizes the negated losses into fitness, estimates a
gradient per hole and takes an ascent step.  The argmax program (most
probable token per categorical hole, mean per real hole) is evaluated every
iteration and the best one seen is kept.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .dists import (
    SCORE_KINDS,
    SCORE_SOFTMAX,
    CategoricalTheta,
    GaussianTheta,
    _categorical_accumulator,
    sample_categorical_many,
    standardize_fitness,
)
from .interp import NONFINITE_PENALTY, SpecSet, eval_population_losses, eval_spec_loss
from .sketch import Assignment, KIND_REAL, Sketch, SketchError, instantiate

OPTIMIZER_SGD = "sgd"
OPTIMIZER_ADAM = "adam"
OPTIMIZERS = (OPTIMIZER_SGD, OPTIMIZER_ADAM)


class ConfigError(ValueError):
    """Invalid training configuration."""


class EnumerationError(ValueError):
    """Discrete search space too large to enumerate."""


@dataclass
class TrainConfig:
    """Hyperparameters for one training run.

    `sigma` is the fixed standard deviation of every real hole's search
    distribution; `penalty` replaces non-finite candidate losses; `parallel`
    switches between vectorized population evaluation and a per-candidate
    loop (both produce bit-identical results).
    """

    learning_rate: float
    iterations: int
    population: int = 50
    sigma: float = 0.5
    seed: int = 0
    optimizer: str = OPTIMIZER_SGD
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    categorical_score: str = SCORE_SOFTMAX
    penalty: float = NONFINITE_PENALTY
    # Real holes start at the multiplicative identity rather than 0.0: a zero
    # mean parks guard thresholds outside any positive data range and zeroes
    # out multiplicative candidates, which traps a large fraction of runs in
    # a dead-branch basin.
    mu_init: float = 1.0
    parallel: bool = True

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be at least 1, got {self.iterations}")
        if self.population < 2:
            raise ConfigError(f"population must be at least 2, got {self.population}")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.categorical_score not in SCORE_KINDS:
            raise ConfigError(f"categorical_score must be one of {SCORE_KINDS}, got {self.categorical_score!r}")
        if not 0 <= self.adam_beta1 < 1 or not 0 <= self.adam_beta2 < 1:
            raise ConfigError("adam betas must lie in [0, 1)")
        if not self.adam_eps > 0:
            raise ConfigError("adam_eps must be positive")
        if not (self.penalty > 0 and math.isfinite(self.penalty)):
            raise ConfigError(f"penalty must be positive and finite, got {self.penalty}")
        if not math.isfinite(self.mu_init):
            raise ConfigError("mu_init must be finite")


@dataclass(frozen=True)
class TrainRecord:
    iteration: int
    mean_population_loss: float
    argmax_loss: float
    best_so_far_loss: float


@dataclass
class TrainResult:
    thetas: list
    best_thetas: list
    best_program: Sketch
    best_loss: float
    final_program: Sketch
    final_loss: float
    records: list[TrainRecord] = field(default_factory=list)


class Population:
    """Per-hole draws and concrete values for one iteration's candidates."""

    def __init__(self, real_mask: tuple[bool, ...], draws: list[np.ndarray], values: list[np.ndarray]):
        self.real_mask = real_mask  # True where the hole is a real hole
        self.draws = draws  # int indices for categorical holes, standard-normal eps for real holes
        self.values = values  # indices again, or mu + sigma * eps
        self.size = len(values[0]) if values else 0

    def assignment(self, i: int) -> Assignment:
        vals = []
        for is_real, col in zip(self.real_mask, self.values):
            vals.append(float(col[i]) if is_real else int(col[i]))
        return Assignment(tuple(vals))

    def assignments(self) -> list[Assignment]:
        return [self.assignment(i) for i in range(self.size)]


def init_thetas(sketch: Sketch, config: TrainConfig) -> list:
    """Uniform logits for categorical holes, N(mu_init, sigma) for real holes."""
    thetas = []
    for hole in sketch.holes:
        if hole.kind == KIND_REAL:
            thetas.append(GaussianTheta(config.mu_init, config.sigma))
        else:
            thetas.append(CategoricalTheta(np.zeros(hole.arity)))
    return thetas


def hole_streams(seed: int, n_holes: int) -> list[np.random.Generator]:
    """One independent random stream per hole, derived from the master seed.

    Sampling happens before the (possibly parallel) evaluation phase, so the
    draws cannot depend on evaluation order.
    """
    root = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(child)) for child in root.spawn(max(n_holes, 1))]


def _streams_for(rng, n_holes: int) -> list:
    if isinstance(rng, np.random.Generator):
        return [rng] * n_holes
    return list(rng)


def sample_population(thetas: list, n: int, rng) -> Population:
    """Draw n candidates: category indices per categorical hole, mu + sigma*eps per real hole.

    `rng` is either one numpy Generator (shared by all holes, consumed in
    hole order) or a sequence of per-hole Generators.
    """
    streams = _streams_for(rng, len(thetas))
    draws: list[np.ndarray] = []
    values: list[np.ndarray] = []
    real_mask = []
    for theta, stream in zip(thetas, streams):
        if isinstance(theta, GaussianTheta):
            eps = stream.standard_normal(n)
            draws.append(eps)
            values.append(theta.mu + theta.sigma * eps)
            real_mask.append(True)
        else:
            idx = sample_categorical_many(theta, n, stream)
            draws.append(idx)
            values.append(idx)
            real_mask.append(False)
    return Population(tuple(real_mask), draws, values)


def _population_losses(sketch: Sketch, population: Population, spec: SpecSet, config: TrainConfig) -> np.ndarray:
    if config.parallel:
        return eval_population_losses(sketch, population.values, spec, config.penalty)
    losses = np.empty(population.size, dtype=np.float64)
    for i in range(population.size):
        program = instantiate(sketch, population.assignment(i))
        losses[i] = eval_spec_loss(program, spec, config.penalty)
    return losses


def estimate_gradients(thetas: list, population: Population, fitness: np.ndarray, score: str = SCORE_SOFTMAX) -> list:
    """Per-hole parameter gradients from one scored population.

    Returns one float per Gaussian hole (d/d mu) and one vector per
    categorical hole, in hole order.  Every hole's gradient is estimated
    from the same population.
    """
    grads = []
    for theta, draws in zip(thetas, population.draws):
        if isinstance(theta, GaussianTheta):
            grads.append(float(np.dot(fitness, draws) / (fitness.size * theta.sigma)))
        else:
            grads.append(_categorical_accumulator(theta.probs, draws, fitness, score))
    return grads


class SgdOptimizer:
    def __init__(self, learning_rate: float):
        self.learning_rate = learning_rate

    def step(self, thetas: list, grads: list) -> list:
        out = []
        for theta, g in zip(thetas, grads):
            if isinstance(theta, GaussianTheta):
                out.append(GaussianTheta(theta.mu + self.learning_rate * g, theta.sigma))
            else:
                out.append(CategoricalTheta(theta.logits + self.learning_rate * g))
        return out


class AdamOptimizer:
    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: list | None = None
        self.v: list | None = None

    def step(self, thetas: list, grads: list) -> list:
        gs = [np.atleast_1d(np.asarray(g, dtype=np.float64)) for g in grads]
        if self.m is None:
            self.m = [np.zeros_like(g) for g in gs]
            self.v = [np.zeros_like(g) for g in gs]
        self.t += 1
        out = []
        for i, (theta, g) in enumerate(zip(thetas, gs)):
            self.m[i] = self.beta1 * self.m[i] + (1 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1 - self.beta2) * g * g
            mhat = self.m[i] / (1 - self.beta1**self.t)
            vhat = self.v[i] / (1 - self.beta2**self.t)
            delta = self.learning_rate * mhat / (np.sqrt(vhat) + self.eps)
            if isinstance(theta, GaussianTheta):
                out.append(GaussianTheta(theta.mu + float(delta[0]), theta.sigma))
            else:
                out.append(CategoricalTheta(theta.logits + delta))
        return out


def make_optimizer(config: TrainConfig):
    if config.optimizer == OPTIMIZER_ADAM:
        return AdamOptimizer(config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_eps)
    return SgdOptimizer(config.learning_rate)


def argmax_program(sketch: Sketch, thetas: list) -> Sketch:
    """Most probable concrete program: highest-logit token (ties break to the
    lowest index) per categorical hole, the mean per real hole."""
    if len(thetas) != sketch.hole_count:
        raise SketchError(f"{len(thetas)} thetas for {sketch.hole_count} holes")
    values = []
    for theta in thetas:
        if isinstance(theta, GaussianTheta):
            values.append(theta.mu)
        else:
            values.append(int(np.argmax(theta.logits)))
    return instantiate(sketch, Assignment(tuple(values)))


def train_step(
    sketch: Sketch,
    spec: SpecSet,
    thetas: list,
    config: TrainConfig,
    rng,
    optimizer=None,
    iteration: int = 1,
    prev_best: float = math.inf,
) -> tuple[list, TrainRecord]:
    """One full iteration; returns the updated thetas and its record."""
    optimizer = optimizer or make_optimizer(config)
    population = sample_population(thetas, config.population, rng)
    losses = _population_losses(sketch, population, spec, config)
    fitness = standardize_fitness(losses)
    grads = estimate_gradients(thetas, population, fitness, config.categorical_score)
    new_thetas = optimizer.step(thetas, grads)
    program = argmax_program(sketch, new_thetas)
    argmax_loss = eval_spec_loss(program, spec, config.penalty)
    record = TrainRecord(
        iteration=iteration,
        mean_population_loss=float(np.mean(losses)),
        argmax_loss=argmax_loss,
        best_so_far_loss=min(prev_best, argmax_loss),
    )
    return new_thetas, record


def train(sketch: Sketch, spec: SpecSet, config: TrainConfig) -> TrainResult:
    """Run the full loop; deterministic given (sketch, spec, config)."""
    if spec.arity != sketch.arity:
        raise SketchError(f"spec arity {spec.arity} does not match sketch arity {sketch.arity}")
    if sketch.hole_count == 0:
        raise SketchError("sketch has no holes; nothing to train")
    thetas = init_thetas(sketch, config)
    streams = hole_streams(config.seed, sketch.hole_count)
    optimizer = make_optimizer(config)
    records: list[TrainRecord] = []
    best_loss = math.inf
    best_program = None
    best_thetas = None
    for it in range(1, config.iterations + 1):
        thetas, record = train_step(
            sketch, spec, thetas, config, streams, optimizer=optimizer, iteration=it, prev_best=best_loss
        )
        if record.argmax_loss < best_loss:
            best_loss = record.argmax_loss
            best_program = argmax_program(sketch, thetas)
            best_thetas = [t.copy() for t in thetas]
        records.append(record)
    final_program = argmax_program(sketch, thetas)
    final_loss = eval_spec_loss(final_program, spec, config.penalty)
    return TrainResult(
        thetas=thetas,
        best_thetas=best_thetas,
        best_program=best_program,
        best_loss=best_loss,
        final_program=final_program,
        final_loss=final_loss,
        records=records,
    )


def enumerate_discrete(
    sketch: Sketch,
    real_values,
    spec: SpecSet,
    cap: int = 10**6,
    penalty: float = NONFINITE_PENALTY,
) -> list[tuple[Assignment, float]]:
    """Exhaustively score every categorical combination, reals pinned.

    real_values supplies one number per [Real] hole, in hole order.  Returns
    (assignment, loss) pairs in ascending loss order; ties break
    lexicographically on the category indices.  Raises EnumerationError if
    the discrete space exceeds `cap`.
    """
    real_values = [float(v) for v in real_values]
    real_holes = [h for h in sketch.holes if h.kind == KIND_REAL]
    cat_holes = [h for h in sketch.holes if h.kind != KIND_REAL]
    if len(real_values) != len(real_holes):
        raise SketchError(f"sketch has {len(real_holes)} [Real] holes but {len(real_values)} values given")
    space = 1
    for hole in cat_holes:
        space *= hole.arity
    if space > cap:
        raise EnumerationError(f"{space} discrete programs exceed the cap of {cap}")
    reals = dict(zip((h.index for h in real_holes), real_values))
    ranked = []
    for combo in itertools.product(*(range(h.arity) for h in cat_holes)):
        cats = dict(zip((h.index for h in cat_holes), combo))
        values = tuple(reals[h.index] if h.kind == KIND_REAL else cats[h.index] for h in sketch.holes)
        assignment = Assignment(values)
        loss = eval_spec_loss(instantiate(sketch, assignment), spec, penalty)
        ranked.append((combo, assignment, loss))
    ranked.sort(key=lambda item: (item[2], item[0]))
    return [(assignment, loss) for _, assignment, loss in ranked]


def loss_spikes(mean_losses, window: int = 101, factor: float = 3.0, start: int = 1000) -> list[int]:
    """Iterations (1-based) after `start` where the mean population loss
    exceeds `factor` times the local windowed median."""
    x = np.asarray(mean_losses, dtype=np.float64)
    half = window // 2
    spikes = []
    for t in range(start, x.size):
        lo = max(0, t - half)
        hi = min(x.size, t + half + 1)
        if x[t] > factor * np.median(x[lo:hi]):
            spikes.append(t + 1)
    return spikes
