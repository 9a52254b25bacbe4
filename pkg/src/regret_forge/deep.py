"""Model-free neural CFR solvers with baseline variance reduction.

Each iteration clears the per-iteration advantage buffers, runs K sampled
traversals per player against frozen start-of-iteration networks, then
trains that player's cumulative advantage network by bootstrapping from
its previous iterate (discounted and clipped per variant), optionally an
instantaneous advantage network for the predictive variant, and the shared
history value network on TD targets under the next strategy.  After the
final iteration the average strategy network is fit to the reservoir of
strategy samples with (t/T)^gamma weights.

Exploitability checkpoints along the way fit a throwaway average-strategy
snapshot to the reservoir collected so far; that is a measurement device,
not part of the algorithm.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .buffers import CIRCULAR, PER_ITERATION, RESERVOIR, Buffer, TransitionSample
from .exploitability import extract_policy
from .games import Game, GameId, InfoSetId, new_game
from .nets import (
    MlpParams,
    adam_step,
    forward,
    init_adam,
    init_mlp,
    make_target_bootstrap_cumulative,
    mse_gradients,
    strategy_loss_weight,
)
from .tabular import TabularPolicy, regret_matching_argmax
from .traversal import TraversalContext, history_cache_key, traverse
from .tree import compiled

VR_DEEP_DCFR_PLUS = "vr_deep_dcfr_plus"
VR_DEEP_PDCFR_PLUS = "vr_deep_pdcfr_plus"
VR_DEEP_CFR = "vr_deep_cfr"
VR_DEEP_LINEAR_CFR = "vr_deep_linear_cfr"
DEEP_PDCFR_PLUS_NO_BASELINE = "deep_pdcfr_plus_no_baseline"


@dataclass(frozen=True)
class DeepVariant:
    """Loss shape of one neural solver variant."""

    name: str
    alpha: float
    gamma: float
    uses_prediction: bool
    uses_baseline: bool
    discount_kind: str  # dcfr_plus | linear | none

    @property
    def discounted(self) -> bool:
        return self.discount_kind in ("dcfr_plus", "linear")

    @property
    def clipped(self) -> bool:
        return self.discount_kind == "dcfr_plus"

    @property
    def bootstrap_alpha(self) -> float:
        # The linear (t-1)/t weighting is the alpha=1 discount.
        return 1.0 if self.discount_kind == "linear" else self.alpha


DEEP_VARIANTS = {
    VR_DEEP_DCFR_PLUS: DeepVariant(VR_DEEP_DCFR_PLUS, alpha=2.0, gamma=2.0,
                                   uses_prediction=False, uses_baseline=True,
                                   discount_kind="dcfr_plus"),
    VR_DEEP_PDCFR_PLUS: DeepVariant(VR_DEEP_PDCFR_PLUS, alpha=2.3, gamma=2.0,
                                    uses_prediction=True, uses_baseline=True,
                                    discount_kind="dcfr_plus"),
    VR_DEEP_CFR: DeepVariant(VR_DEEP_CFR, alpha=0.0, gamma=0.0,
                             uses_prediction=False, uses_baseline=True,
                             discount_kind="none"),
    VR_DEEP_LINEAR_CFR: DeepVariant(VR_DEEP_LINEAR_CFR, alpha=1.0, gamma=1.0,
                                    uses_prediction=False, uses_baseline=True,
                                    discount_kind="linear"),
    DEEP_PDCFR_PLUS_NO_BASELINE: DeepVariant(DEEP_PDCFR_PLUS_NO_BASELINE, alpha=2.3,
                                             gamma=2.0, uses_prediction=True,
                                             uses_baseline=False,
                                             discount_kind="dcfr_plus"),
}


def deep_variant(name: str, alpha: float | None = None,
                 gamma: float | None = None) -> DeepVariant:
    base = DEEP_VARIANTS.get(name)
    if base is None:
        raise ValueError(f"unknown deep variant {name!r}")
    if alpha is not None:
        base = replace(base, alpha=alpha)
    if gamma is not None:
        base = replace(base, gamma=gamma)
    return base


@dataclass(frozen=True)
class RunConfig:
    """Hyperparameters for one seeded neural run (defaults at paper scale)."""

    game: GameId
    variant: DeepVariant
    iterations: int
    traversals: int = 10_000
    epsilon: float = 0.6
    learning_rate: float = 0.001
    advantage_buffer_size: int = 1_000_000
    strategy_buffer_size: int = 1_000_000
    history_value_buffer_size: int = 1_000_000
    advantage_train_steps: int = 750
    advantage_batch_size: int = 2048
    strategy_train_steps: int = 5000
    strategy_batch_size: int = 2048
    value_train_steps: int = 10_000
    value_batch_size: int = 2048
    num_layers: int = 3
    num_hiddens: int = 64
    seed: int = 0
    eval_checkpoints: tuple[int, ...] = ()  # empty = every doubling of episodes

    def __post_init__(self):
        for name in ("iterations", "traversals", "advantage_buffer_size",
                     "strategy_buffer_size", "history_value_buffer_size",
                     "advantage_train_steps", "advantage_batch_size",
                     "strategy_train_steps", "strategy_batch_size",
                     "value_train_steps", "value_batch_size",
                     "num_layers", "num_hiddens"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")

    def checkpoints(self) -> tuple[int, ...]:
        if self.eval_checkpoints:
            return tuple(sorted(set(self.eval_checkpoints) | {self.iterations}))
        points = set()
        t = 1
        while t < self.iterations:
            points.add(t)
            t *= 2
        points.add(self.iterations)
        return tuple(sorted(points))


@dataclass
class RunLogRow:
    iteration: int
    episodes: int
    exploitability: float
    wall_time_s: float


@dataclass
class DeepRunResult:
    psi: MlpParams
    log: list[RunLogRow]
    policy: TabularPolicy


# rng stream purposes (stable entropy tags)
_THETA, _PHI, _OMEGA, _PSI = 1, 2, 3, 4
_TRAVERSE, _TRAIN, _RESERVOIR, _SNAPSHOT = 5, 6, 7, 8


def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed,) + tags))


def current_strategy(variant: DeepVariant, nets: "NetBundle", infoset: InfoSetId,
                     action_ids: tuple[int, ...], t: int) -> np.ndarray:
    """Strategy at `infoset` for iteration t from the (t-1)-iterate networks."""
    feats = nets.infoset_features(infoset)
    ids = list(action_ids)
    cum = forward(nets.theta[infoset.owner], feats)[ids]
    if not variant.uses_prediction:
        return regret_matching_argmax(cum)
    x = float(t - 1)
    d = 0.0 if x == 0.0 else 1.0 / (1.0 + x ** -variant.alpha)
    inst = forward(nets.phi[infoset.owner], feats)[ids]
    return regret_matching_argmax(np.maximum(cum, 0.0) * d + inst)


@dataclass
class NetBundle:
    """Frozen network snapshot used for one iteration's data collection."""

    game: Game
    theta: list[MlpParams]
    phi: list[MlpParams] | None = None
    omega: MlpParams | None = None
    _features: dict[InfoSetId, np.ndarray] = field(default_factory=dict)

    def infoset_features(self, infoset: InfoSetId) -> np.ndarray:
        feat = self._features.get(infoset)
        if feat is None:
            feat = self.game.encode_infoset(infoset)
            self._features[infoset] = feat
        return feat


def q_training_targets(batch: list[TransitionSample], strategy_fn,
                       omega_target: MlpParams) -> np.ndarray:
    """TD targets: terminal utility, else expected next Q under sigma^{t+1}.

    `strategy_fn(infoset, action_ids, player)` supplies the next-iteration
    strategy of the player acting at the successor node.  Values are
    player 0's throughout.
    """
    targets = np.array([s.utility for s in batch], dtype=np.float64)
    live = [(i, s) for i, s in enumerate(batch) if not s.terminal]
    if not live:
        return targets
    feats = np.stack([s.next_h_features for _, s in live])
    q_rows = forward(omega_target, feats)
    by_infoset: dict[InfoSetId, list[tuple[int, int]]] = {}
    rep: dict[InfoSetId, TransitionSample] = {}
    for row, (i, s) in enumerate(live):
        by_infoset.setdefault(s.next_infoset, []).append((row, i))
        rep.setdefault(s.next_infoset, s)
    for infoset, group in by_infoset.items():
        s = rep[infoset]
        sigma = strategy_fn(infoset, s.next_action_ids, s.next_player)
        rows = [g[0] for g in group]
        idxs = [g[1] for g in group]
        targets[idxs] += q_rows[np.ix_(rows, list(s.next_action_ids))] @ sigma
    return targets


def _train(params: MlpParams, opt, X, Y, mask, weights, index_matrix, what: str):
    """Minibatch-train on pre-drawn row indices (one row of indices per step)."""
    loss = 0.0
    for idx in index_matrix:
        grads, loss = mse_gradients(params, X[idx], Y[idx],
                                    mask[idx] if mask is not None else None,
                                    weights[idx] if weights is not None else None)
        params, opt = adam_step(params, opt, grads)
    if not np.isfinite(loss):
        raise RuntimeError(f"non-finite {what} loss {loss}; aborting run")
    return params, opt


def _draw_batches(n_items: int, steps: int, batch: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Pre-draw all minibatch rows; returns (unique item ids, per-step rows).

    Targets then only need computing for the unique drawn items, which
    keeps a training phase's cost bounded by steps*batch rather than the
    full buffer size.
    """
    draws = rng.integers(0, n_items, size=(steps, batch))
    uniq, inverse = np.unique(draws, return_inverse=True)
    return uniq, inverse.reshape(steps, batch)


def _advantage_matrices(game: Game, samples, prev_theta: MlpParams, t: int,
                        variant: DeepVariant, bootstrap: bool):
    X = np.stack([s.features for s in samples])
    prev = forward(prev_theta, X) if bootstrap else None
    Y = np.zeros((len(samples), game.num_actions))
    mask = np.zeros_like(Y)
    for i, s in enumerate(samples):
        ids = list(s.action_ids)
        mask[i, ids] = 1.0
        if bootstrap:
            Y[i, ids] = make_target_bootstrap_cumulative(
                prev[i, ids], s.regrets, t, variant.bootstrap_alpha,
                variant.discounted, variant.clipped)
        else:
            Y[i, ids] = s.regrets
    return X, Y, mask


def train_average_strategy(game: Game, samples, effective_iterations: int,
                           gamma: float, config: RunConfig,
                           init_rng, batch_rng) -> MlpParams:
    """Fit the average-strategy network to reservoir samples."""
    dims = (game.infoset_dim, *([config.num_hiddens] * config.num_layers), game.num_actions)
    psi = init_mlp(dims, init_rng)
    opt = init_adam(psi, config.learning_rate)
    uniq, batches = _draw_batches(len(samples), config.strategy_train_steps,
                                  config.strategy_batch_size, batch_rng)
    drawn = [samples[i] for i in uniq]
    X = np.stack([s.features for s in drawn])
    Y = np.zeros((len(drawn), game.num_actions))
    mask = np.zeros_like(Y)
    w = np.empty(len(drawn))
    for i, s in enumerate(drawn):
        ids = list(s.action_ids)
        Y[i, ids] = s.strategy
        mask[i, ids] = 1.0
        w[i] = strategy_loss_weight(s.iteration, effective_iterations, gamma)
    psi, _ = _train(psi, opt, X, Y, mask, w, batches, "average strategy")
    return psi


def policy_from_net(game: Game, psi: MlpParams) -> TabularPolicy:
    features: dict[InfoSetId, np.ndarray] = {}

    def source(key: InfoSetId, action_ids):
        feat = features.get(key)
        if feat is None:
            feat = game.encode_infoset(key)
            features[key] = feat
        return forward(psi, feat)[list(action_ids)]

    return extract_policy(game, source)


def run(config: RunConfig, on_checkpoint=None) -> DeepRunResult:
    """Execute one seeded neural CFR run and return the strategy network.

    `on_checkpoint(RunLogRow)`, when given, is called as each evaluation
    row is produced.
    """
    game = new_game(config.game)
    flat = compiled(game)
    variant = config.variant
    seed = config.seed
    dims_iso = (game.infoset_dim, *([config.num_hiddens] * config.num_layers), game.num_actions)
    dims_hist = (game.history_dim, *([config.num_hiddens] * config.num_layers), game.num_actions)

    theta = [init_mlp(dims_iso, _rng(seed, _THETA, p)) for p in (0, 1)]
    theta_opt = [init_adam(theta[p], config.learning_rate) for p in (0, 1)]
    phi = [init_mlp(dims_iso, _rng(seed, _PHI, p, 0)) for p in (0, 1)]
    omega = init_mlp(dims_hist, _rng(seed, _OMEGA))
    omega_opt = init_adam(omega, config.learning_rate)

    adv_buffers = tuple(Buffer(PER_ITERATION, config.advantage_buffer_size) for _ in (0, 1))
    strat_buffer = Buffer(RESERVOIR, config.strategy_buffer_size, rng=_rng(seed, _RESERVOIR))
    q_buffer = Buffer(CIRCULAR, config.history_value_buffer_size)

    checkpoints = set(config.checkpoints())
    log: list[RunLogRow] = []
    start = time.monotonic()

    for t in range(1, config.iterations + 1):
        frozen = NetBundle(game, [theta[0], theta[1]],
                           [phi[0], phi[1]] if variant.uses_prediction else None,
                           omega)
        strategy_cache: dict[InfoSetId, np.ndarray] = {}

        def frozen_strategy(infoset, action_ids, bundle=frozen, cache=strategy_cache, it=t):
            sigma = cache.get(infoset)
            if sigma is None:
                sigma = current_strategy(variant, bundle, infoset, action_ids, it)
                cache[infoset] = sigma
            return sigma

        q_cache: dict[tuple, np.ndarray] = {}

        def frozen_q(h, action_ids, net=omega, cache=q_cache):
            key = history_cache_key(h)
            row = cache.get(key)
            if row is None:
                row = forward(net, game.encode_history(h))
                cache[key] = row
            return row[list(action_ids)]

        for buf in adv_buffers:
            buf.clear()
            assert len(buf) == 0
        for player in (0, 1):
            ctx = TraversalContext(
                game=game, epsilon=config.epsilon, strategy=frozen_strategy,
                q_values=frozen_q if variant.uses_baseline else None,
                adv_buffers=adv_buffers, strat_buffer=strat_buffer,
                transition_buffer=q_buffer if variant.uses_baseline else None,
            )
            t_rng = _rng(seed, _TRAVERSE, t, player)
            root = game.root()
            for _ in range(config.traversals):
                traverse(root, player, ctx, t, t_rng)

            samples = adv_buffers[player].items()
            if not samples:
                raise RuntimeError(f"no advantage samples for player {player} at t={t}")
            X, Y, mask = _advantage_matrices(game, samples, frozen.theta[player], t,
                                             variant, True)
            theta_rng = _rng(seed, _TRAIN, _THETA, t, player)
            batches = theta_rng.integers(0, len(samples), size=(
                config.advantage_train_steps, config.advantage_batch_size))
            theta[player], theta_opt[player] = _train(
                theta[player], theta_opt[player], X, Y, mask, None,
                batches, "cumulative advantage")

            if variant.uses_prediction:
                phi[player] = init_mlp(dims_iso, _rng(seed, _PHI, player, t))
                phi_opt = init_adam(phi[player], config.learning_rate)
                _, Yi, mi = _advantage_matrices(game, samples, frozen.theta[player], t,
                                                variant, False)
                phi_rng = _rng(seed, _TRAIN, _PHI, t, player)
                pbatches = phi_rng.integers(0, len(samples), size=(
                    config.advantage_train_steps, config.advantage_batch_size))
                phi[player], _ = _train(
                    phi[player], phi_opt, X, Yi, mi, None,
                    pbatches, "instantaneous advantage")

            if variant.uses_baseline:
                live = NetBundle(game, [theta[0], theta[1]],
                                 [phi[0], phi[1]] if variant.uses_prediction else None)
                next_cache: dict[InfoSetId, np.ndarray] = {}

                def next_strategy(infoset, action_ids, acting_player,
                                  bundle=live, cache=next_cache, it=t + 1):
                    sigma = cache.get(infoset)
                    if sigma is None:
                        sigma = current_strategy(variant, bundle, infoset, action_ids, it)
                        cache[infoset] = sigma
                    return sigma

                transitions = q_buffer.items()
                uniq, qbatches = _draw_batches(
                    len(transitions), config.value_train_steps,
                    config.value_batch_size, _rng(seed, _TRAIN, _OMEGA, t, player))
                drawn = [transitions[i] for i in uniq]
                targets = q_training_targets(drawn, next_strategy, frozen.omega)
                Xq = np.stack([s.h_features for s in drawn])
                Yq = np.zeros((len(drawn), game.num_actions))
                mq = np.zeros_like(Yq)
                for i, s in enumerate(drawn):
                    Yq[i, s.action_id] = targets[i]
                    mq[i, s.action_id] = 1.0
                omega, omega_opt = _train(
                    omega, omega_opt, Xq, Yq, mq, None,
                    qbatches, "history value")

        if t in checkpoints:
            if t == config.iterations:
                psi = train_average_strategy(
                    game, strat_buffer.items(), config.iterations, variant.gamma,
                    config, _rng(seed, _PSI), _rng(seed, _TRAIN, _PSI))
                policy = policy_from_net(game, psi)
            else:
                snap = train_average_strategy(
                    game, strat_buffer.items(), t, variant.gamma,
                    config, _rng(seed, _SNAPSHOT, _PSI, t), _rng(seed, _SNAPSHOT, _TRAIN, t))
                policy = policy_from_net(game, snap)
            slots = flat.policy_slots(policy)
            expl = 0.5 * (flat.best_response_value(slots, 0)
                          + flat.best_response_value(slots, 1))
            row = RunLogRow(iteration=t, episodes=2 * config.traversals * t,
                            exploitability=expl,
                            wall_time_s=time.monotonic() - start)
            log.append(row)
            if on_checkpoint is not None:
                on_checkpoint(row)

    return DeepRunResult(psi=psi, log=log, policy=policy)
