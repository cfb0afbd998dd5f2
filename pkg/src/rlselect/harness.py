"""Experiment drivers: training runs, evaluation tables, comparisons, stability,
learning curves, timing ratios, and the featurization pipeline.

Every command is a pure function of (config, seeds, input files): all
randomness flows from the config's root seed through named sub-seeds, so
reruns produce identical outputs and each component is independently
reproducible. Wall-clock timings are written to a separate ``timings.json``
so the main ``report.json`` stays byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import baselines, classifiers, net
from .agent import AgentConfig, ReplayMemory, State, Transition, select_action, train_step
from .classifiers import ClassifierKind
from .dataset import (
    FeatureDictionary,
    SampleMatrix,
    SplitKind,
    SyntheticSpec,
    generate_synthetic,
    load_csv,
    project,
    save_csv,
    stratified_split,
)
from .env import FeatureEnv, RewardOracle
from .featurize import (
    DEFAULT_OPCODE_MAP,
    build_vocabulary,
    map_dalvik_to_letters,
    vectorize_declared,
    vectorize_ngrams,
)
from .net import NetworkConfig, OptimizerState

__version__ = "0.1.0"

CLASSIFIER_ALIASES = {"dt": "dt", "rf": "rf", "knn": "knn", "svm": "svm"}
COMPARE_METHODS = ("rl", "information_gain", "chi_square", "random")

# Table-6 operating point, used when a run is flagged paper-scale.
PAPER_SCALE = {
    "warmup_steps": 50_000,
    "replay_capacity": 200_000,
    "batch_size": 32,
    "gamma": 0.99,
    "base_rate": 0.0003,
    "learn_frequency": 5,
}


class ConfigError(ValueError):
    """Unusable run configuration (bad file, bad field, inconsistent values)."""


def sub_seed(root_seed: int, name: str) -> int:
    """Stable named sub-stream seed derived from the root seed."""
    digest = hashlib.sha256(f"{root_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment needs; fully round-trippable through JSON.

    Desk-scale defaults keep a full training run in the minutes range;
    ``paper_scale()`` restores the published operating point.
    """

    csv_path: str | None = None
    synthetic: SyntheticSpec | None = SyntheticSpec(
        n_samples=2000, n_features=100, informative=tuple(range(10)), q=0.75, seed=7
    )
    classifier: ClassifierKind = ClassifierKind.decision_tree()
    embed_dim: int = 8
    hidden_dim: int = 256
    cell: str = "rnn"
    head: str = "linear"
    subset_size: int = 10
    total_episodes: int = 300
    p: float = 0.5
    warmup_steps: int = 2_000
    batch_size: int = 32
    gamma: float = 0.0
    learn_frequency: int = 1
    sync_frequency: int = 100
    ddqn_convention: str = "paper"
    replay_capacity: int = 20_000
    base_rate: float = 0.1
    total_steps: int | None = None
    clip_norm: float = 5.0
    oracle_fit_fraction: float = 0.8
    seed: int = 0
    out_dir: str = "runs/out"

    def __post_init__(self):
        if (self.csv_path is None) == (self.synthetic is None):
            raise ConfigError("config needs exactly one of csv_path or synthetic")

    def agent_config(self) -> AgentConfig:
        return AgentConfig(
            subset_size=self.subset_size,
            total_episodes=self.total_episodes,
            p=self.p,
            warmup_steps=self.warmup_steps,
            batch_size=self.batch_size,
            gamma=self.gamma,
            learn_frequency=self.learn_frequency,
            sync_frequency=self.sync_frequency,
            ddqn_convention=self.ddqn_convention,
        )

    def network_config(self, n_features: int) -> NetworkConfig:
        return NetworkConfig.for_features(
            n_features, self.embed_dim, self.hidden_dim, self.cell, self.head
        )

    def optimizer_state(self) -> OptimizerState:
        total = self.total_steps
        if total is None:
            # Learn events per run, doubled so the rate only halves by the end.
            events = (
                self.total_episodes // self.learn_frequency
                + self.total_episodes // self.sync_frequency
            )
            total = max(1, 2 * events)
        return OptimizerState(total_steps=total, base_rate=self.base_rate, clip_norm=self.clip_norm)

    def paper_scale(self) -> "RunConfig":
        return replace(self, **PAPER_SCALE)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        d = {
            "dataset": (
                {"csv": self.csv_path}
                if self.csv_path is not None
                else {"synthetic": asdict(self.synthetic) | {"informative": list(self.synthetic.informative)}}
            ),
            "classifier": {
                "name": self.classifier.name,
                "trees": self.classifier.trees,
                "k": self.classifier.k,
                "lam": self.classifier.lam,
                "epochs": self.classifier.epochs,
            },
            "network": {
                "embed_dim": self.embed_dim,
                "hidden_dim": self.hidden_dim,
                "cell": self.cell,
                "head": self.head,
            },
            "agent": {
                "subset_size": self.subset_size,
                "total_episodes": self.total_episodes,
                "p": self.p,
                "warmup_steps": self.warmup_steps,
                "batch_size": self.batch_size,
                "gamma": self.gamma,
                "learn_frequency": self.learn_frequency,
                "sync_frequency": self.sync_frequency,
                "ddqn_convention": self.ddqn_convention,
            },
            "replay_capacity": self.replay_capacity,
            "optimizer": {
                "base_rate": self.base_rate,
                "total_steps": self.total_steps,
                "clip_norm": self.clip_norm,
            },
            "oracle_fit_fraction": self.oracle_fit_fraction,
            "seed": self.seed,
            "out_dir": self.out_dir,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        try:
            dataset = d.get("dataset", {})
            csv_path = dataset.get("csv")
            synthetic = None
            if "synthetic" in dataset:
                s = dict(dataset["synthetic"])
                informative = s.get("informative", 0)
                if isinstance(informative, int):
                    informative = list(range(informative))
                synthetic = SyntheticSpec(
                    n_samples=s["n_samples"],
                    n_features=s["n_features"],
                    informative=tuple(informative),
                    q=s["q"],
                    seed=s.get("seed", 0),
                )
            clf = d.get("classifier", {})
            classifier = ClassifierKind(
                name=clf.get("name", "dt"),
                trees=clf.get("trees", 100),
                k=clf.get("k", 5),
                lam=clf.get("lam", 1e-4),
                epochs=clf.get("epochs", 10),
            )
            network = d.get("network", {})
            agent = d.get("agent", {})
            optimizer = d.get("optimizer", {})
            defaults = cls.__dataclass_fields__
            return cls(
                csv_path=csv_path,
                synthetic=synthetic,
                classifier=classifier,
                embed_dim=network.get("embed_dim", defaults["embed_dim"].default),
                hidden_dim=network.get("hidden_dim", defaults["hidden_dim"].default),
                cell=network.get("cell", defaults["cell"].default),
                head=network.get("head", defaults["head"].default),
                subset_size=agent.get("subset_size", defaults["subset_size"].default),
                total_episodes=agent.get("total_episodes", defaults["total_episodes"].default),
                p=agent.get("p", defaults["p"].default),
                warmup_steps=agent.get("warmup_steps", defaults["warmup_steps"].default),
                batch_size=agent.get("batch_size", defaults["batch_size"].default),
                gamma=agent.get("gamma", defaults["gamma"].default),
                learn_frequency=agent.get("learn_frequency", defaults["learn_frequency"].default),
                sync_frequency=agent.get("sync_frequency", defaults["sync_frequency"].default),
                ddqn_convention=agent.get("ddqn_convention", defaults["ddqn_convention"].default),
                replay_capacity=d.get("replay_capacity", defaults["replay_capacity"].default),
                base_rate=optimizer.get("base_rate", defaults["base_rate"].default),
                total_steps=optimizer.get("total_steps"),
                clip_norm=optimizer.get("clip_norm", defaults["clip_norm"].default),
                oracle_fit_fraction=d.get("oracle_fit_fraction", defaults["oracle_fit_fraction"].default),
                seed=d.get("seed", 0),
                out_dir=d.get("out_dir", defaults["out_dir"].default),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad config: {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def load_matrix(config: RunConfig) -> SampleMatrix:
    if config.csv_path is not None:
        return load_csv(config.csv_path)
    return generate_synthetic(config.synthetic)


@dataclass
class RunReport:
    config: dict
    episodes: list[dict]
    selection_order: list[int]  # 0-based dataset columns, in pick order
    final_subset: list[int]  # same indices, sorted
    final_subset_names: list[str]
    final_reward: float
    warmup_transitions: int
    oracle_stats: dict
    timings: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict:
        # timings stay out: reports must be byte-identical across reruns
        return {
            "version": self.version,
            "config": self.config,
            "episodes": self.episodes,
            "selection_order": self.selection_order,
            "final_subset": self.final_subset,
            "final_subset_names": self.final_subset_names,
            "final_reward": self.final_reward,
            "warmup_transitions": self.warmup_transitions,
            "oracle_stats": self.oracle_stats,
        }


def _greedy_rollout(env: FeatureEnv, params: net.NetworkParams, rng) -> list[int]:
    """One evaluation episode (epsilon = 0); returns actions in pick order (1-based)."""
    state = env.reset()
    order = []
    for _ in range(env.subset_size):
        action = select_action(state, 0.0, params, rng)
        state, _, _ = env.step(state, action)
        order.append(action)
    return order


@dataclass
class TrainResult:
    theta1: net.NetworkParams
    theta2: net.NetworkParams
    optimizer: OptimizerState
    report: RunReport
    oracle: RewardOracle


def run_training(
    config: RunConfig,
    matrix: SampleMatrix | None = None,
    per_episode=None,
    oracle: RewardOracle | None = None,
) -> TrainResult:
    """Warm-up, training episodes, and the final greedy evaluation.

    ``per_episode(episode, theta1)`` is invoked after every training episode
    (the learning-curve driver hooks in here).
    """
    t0 = time.perf_counter()
    if matrix is None:
        matrix = load_matrix(config)
    n = matrix.n_features
    cfg = config.agent_config()
    if cfg.subset_size > n:
        raise ConfigError(f"subset_size {cfg.subset_size} exceeds feature count {n}")

    if oracle is None:
        oracle = RewardOracle(
            config.classifier, matrix, sub_seed(config.seed, "oracle"),
            fit_fraction=config.oracle_fit_fraction,
        )
    env = FeatureEnv(n, cfg.subset_size, oracle)
    theta1 = net.init(config.network_config(n), sub_seed(config.seed, "init"))
    theta2 = theta1.copy()
    opt = config.optimizer_state()
    memory = ReplayMemory(config.replay_capacity)
    rng = np.random.default_rng(sub_seed(config.seed, "agent"))
    schedule = cfg.schedule()

    def run_episode(eps: float) -> list[float]:
        state = env.reset()
        rewards = []
        done = False
        while not done:
            prev = state
            action = select_action(state, eps, theta1, rng)
            state, reward, done = env.step(state, action)
            memory.push(Transition(prev, action, reward, state, done))
            rewards.append(reward)
        return rewards

    # Warm-up: uniform-random episodes until enough transitions are stored.
    while memory.inserted < cfg.warmup_steps:
        run_episode(1.0)
    warmup_transitions = memory.inserted
    t_warm = time.perf_counter()

    episodes = []
    for episode in range(1, cfg.total_episodes + 1):
        eps = schedule.epsilon(episode - 1)
        try:
            rewards = run_episode(eps)
            if episode % cfg.learn_frequency == 0 and len(memory) >= cfg.batch_size:
                train_step(memory, theta1, theta2, opt, cfg, rng)
            if episode % cfg.sync_frequency == 0:
                if len(memory) >= cfg.batch_size:
                    train_step(memory, theta1, theta2, opt, cfg, rng)
                net.sync(theta1, theta2)
        except Exception as exc:
            raise RuntimeError(f"training failed at episode {episode}: {exc}") from exc
        episodes.append(
            {
                "episode": episode,
                "epsilon": eps,
                "step_rewards": [float(r) for r in rewards],
                "final_reward": float(rewards[-1]),
            }
        )
        if per_episode is not None:
            per_episode(episode, theta1)
    t_train = time.perf_counter()

    order = _greedy_rollout(env, theta1, rng)
    subset = tuple(sorted(order))
    final_reward = float(oracle(subset))
    t_end = time.perf_counter()

    report = RunReport(
        config=config.to_dict(),
        episodes=episodes,
        selection_order=[a - 1 for a in order],
        final_subset=[a - 1 for a in subset],
        final_subset_names=[matrix.dictionary.names[a - 1] for a in subset],
        final_reward=final_reward,
        warmup_transitions=warmup_transitions,
        oracle_stats={"fits": oracle.fit_count, "cache_hits": oracle.hit_count},
        timings={
            "warmup_s": t_warm - t0,
            "train_s": t_train - t_warm,
            "eval_s": t_end - t_train,
            "total_s": t_end - t0,
        },
    )
    return TrainResult(theta1, theta2, opt, report, oracle)


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_train(config: RunConfig) -> RunReport:
    """Full training run; writes report.json, timings.json, and checkpoint.json."""
    result = run_training(config)
    out = _out_dir(config)
    _write_json(out / "report.json", result.report.to_dict())
    _write_json(out / "timings.json", result.report.timings)
    net.save_checkpoint(out / "checkpoint.json", result.theta1, result.optimizer)
    return result.report


def parse_classifier_list(spec: str) -> list[ClassifierKind]:
    kinds = []
    for token in spec.split(","):
        token = token.strip().lower()
        if token not in CLASSIFIER_ALIASES:
            raise ConfigError(f"unknown classifier {token!r} (use dt, rf, knn, svm)")
        kinds.append(ClassifierKind(CLASSIFIER_ALIASES[token]))
    if not kinds:
        raise ConfigError("empty classifier list")
    return kinds


def cmd_evaluate(
    config: RunConfig,
    subset: list[int],
    kinds: list[ClassifierKind] | None = None,
    folds: int = 10,
) -> list[dict]:
    """Per-classifier k-fold CV accuracy of one 0-based feature subset."""
    if not subset:
        raise ValueError("subset must be nonempty")
    matrix = load_matrix(config)
    sub = sorted(set(int(i) for i in subset))
    if len(sub) != len(subset):
        raise ValueError("subset contains duplicate indices")
    projected = project(matrix, sub)
    plan = stratified_split(projected, SplitKind.kfold(folds), sub_seed(config.seed, "split"))
    kinds = kinds or [ClassifierKind(name) for name in ("dt", "rf", "knn", "svm")]

    rows = []
    for kind in kinds:
        mean, per_fold = classifiers.cv_accuracy(
            kind, projected, plan, sub_seed(config.seed, f"cv-{kind.name}")
        )
        rows.append(
            {
                "classifier": kind.label(),
                "subset_size": len(sub),
                "mean_accuracy": mean,
                "per_fold": per_fold,
            }
        )
    out = _out_dir(config)
    _write_csv(
        out / "evaluate.csv",
        ["classifier", "subset_size", "mean_accuracy"]
        + [f"fold{i}" for i in range(folds)],
        [[r["classifier"], r["subset_size"], r["mean_accuracy"], *r["per_fold"]] for r in rows],
    )
    _write_json(
        out / "evaluate.json",
        {"config": config.to_dict(), "subset": sub, "rows": rows},
    )
    return rows


def cmd_compare(
    config: RunConfig,
    sizes: list[int],
    methods: list[str],
    random_draws: int = 20,
    folds: int = 10,
) -> list[dict]:
    """Subset quality per (method, size): selection + k-fold CV accuracy.

    The random baseline is averaged over ``random_draws`` seeded draws and
    reported with its standard deviation.
    """
    for m in methods:
        if m not in COMPARE_METHODS:
            raise ConfigError(f"unknown method {m!r} (use {', '.join(COMPARE_METHODS)})")
    matrix = load_matrix(config)
    plan = stratified_split(matrix, SplitKind.kfold(folds), sub_seed(config.seed, "split"))

    def cv_of(subset: list[int]) -> float:
        projected = project(matrix, subset)
        sub_plan = stratified_split(
            projected, SplitKind.kfold(folds), sub_seed(config.seed, "split")
        )
        mean, _ = classifiers.cv_accuracy(
            config.classifier, projected, sub_plan, sub_seed(config.seed, "cv")
        )
        return mean

    ig = baselines.information_gain(matrix) if "information_gain" in methods else None
    chi = baselines.chi_square(matrix) if "chi_square" in methods else None

    rows = []
    for size in sizes:
        for method in methods:
            if method == "rl":
                run_cfg = replace(config, subset_size=size)
                result = run_training(run_cfg, matrix=matrix)
                subset = result.report.final_subset
                rows.append(
                    {
                        "method": "rl",
                        "size": size,
                        "subset": subset,
                        "accuracy": cv_of(subset),
                        "accuracy_std": 0.0,
                    }
                )
            elif method in ("information_gain", "chi_square"):
                ranked = ig if method == "information_gain" else chi
                subset = baselines.top_k(ranked, size)
                rows.append(
                    {
                        "method": method,
                        "size": size,
                        "subset": subset,
                        "accuracy": cv_of(subset),
                        "accuracy_std": 0.0,
                    }
                )
            else:  # random
                accs = []
                for draw in range(random_draws):
                    subset = baselines.random_subset(
                        matrix.n_features, size, sub_seed(config.seed, f"random-{size}-{draw}")
                    )
                    accs.append(cv_of(subset))
                rows.append(
                    {
                        "method": "random",
                        "size": size,
                        "subset": [],
                        "accuracy": float(np.mean(accs)),
                        "accuracy_std": float(np.std(accs)),
                    }
                )
    out = _out_dir(config)
    _write_csv(
        out / "compare.csv",
        ["method", "size", "accuracy", "accuracy_std", "subset"],
        [
            [r["method"], r["size"], r["accuracy"], r["accuracy_std"],
             " ".join(str(i) for i in r["subset"])]
            for r in rows
        ],
    )
    _write_json(out / "compare.json", {"config": config.to_dict(), "rows": rows})
    return rows


def cmd_stability(config: RunConfig, runs: int, folds: int = 10) -> dict:
    """Independent trainings; CV accuracy at every prefix length of each greedy subset."""
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    matrix = load_matrix(config)

    per_run = []
    for run in range(runs):
        run_cfg = config.with_seed(sub_seed(config.seed, f"stability-{run}"))
        result = run_training(run_cfg, matrix=matrix)
        order = result.report.selection_order
        curve = []
        for size in range(1, len(order) + 1):
            subset = sorted(order[:size])
            projected = project(matrix, subset)
            plan = stratified_split(
                projected, SplitKind.kfold(folds), sub_seed(config.seed, "split")
            )
            mean, _ = classifiers.cv_accuracy(
                config.classifier, projected, plan, sub_seed(config.seed, "cv")
            )
            curve.append(mean)
        per_run.append({"run": run, "selection_order": order, "accuracies": curve})

    curves = np.array([r["accuracies"] for r in per_run])
    summary = []
    for size in range(curves.shape[1]):
        col = curves[:, size]
        summary.append(
            {
                "size": size + 1,
                "mean": float(col.mean()),
                "std": float(col.std()),
                "min": float(col.min()),
                "max": float(col.max()),
                "range": float(col.max() - col.min()),
            }
        )
    payload = {"config": config.to_dict(), "runs": per_run, "summary": summary}
    out = _out_dir(config)
    _write_csv(
        out / "stability_runs.csv",
        ["run", "size", "accuracy"],
        [[r["run"], s + 1, acc] for r in per_run for s, acc in enumerate(r["accuracies"])],
    )
    _write_csv(
        out / "stability_summary.csv",
        ["size", "mean", "std", "min", "max", "range"],
        [[s["size"], s["mean"], s["std"], s["min"], s["max"], s["range"]] for s in summary],
    )
    _write_json(out / "stability.json", payload)
    return payload


def cmd_curves(config: RunConfig, period: int = 50) -> dict:
    """Greedy-policy accuracy after every training episode, plus period averages.

    The loaded matrix is split 80/20 (stratified): the environment trains
    inside the 80, the held-out 20 provides the test-side accuracy. Each
    episode records the epsilon-greedy episode's own final reward, the greedy
    subset's accuracy under the training oracle, and the mean accuracy of five
    greedy evaluation episodes under the test oracle.
    """
    if period < 1:
        raise ConfigError("period must be >= 1")
    matrix = load_matrix(config)
    outer = stratified_split(matrix, SplitKind.holdout(0.2), sub_seed(config.seed, "curves-split"))
    train_idx, test_idx = outer.train_test()
    train_part = matrix.rows(train_idx)
    test_part = matrix.rows(test_idx)

    train_oracle = RewardOracle(
        config.classifier, train_part, sub_seed(config.seed, "oracle"),
        fit_fraction=config.oracle_fit_fraction,
    )
    # Test oracle: fit on the whole training portion, score the held-out rows.
    test_oracle = _FitScoreOracle(
        config.classifier, train_part, test_part, sub_seed(config.seed, "test-oracle")
    )
    eval_env = FeatureEnv(matrix.n_features, config.subset_size, train_oracle)
    eval_rng = np.random.default_rng(sub_seed(config.seed, "curves-eval"))

    eval_rows = []

    def per_episode(episode: int, theta1: net.NetworkParams):
        order = _greedy_rollout(eval_env, theta1, eval_rng)
        subset = tuple(sorted(order))
        train_acc = float(train_oracle(subset))
        test_acc = float(np.mean([test_oracle(subset) for _ in range(5)]))
        eval_rows.append({"train_accuracy": train_acc, "test_accuracy": test_acc})

    result = run_training(config, matrix=train_part, per_episode=per_episode, oracle=train_oracle)

    rows = []
    for record, ev in zip(result.report.episodes, eval_rows):
        rows.append(
            {
                "episode": record["episode"],
                "epsilon": record["epsilon"],
                "final_reward": record["final_reward"],
                "train_accuracy": ev["train_accuracy"],
                "test_accuracy": ev["test_accuracy"],
            }
        )

    period_rows = []
    for start in range(0, len(rows), period):
        chunk = rows[start : start + period]
        period_rows.append(
            {
                "period": start // period + 1,
                "episode_from": chunk[0]["episode"],
                "episode_to": chunk[-1]["episode"],
                "mean_final_reward": float(np.mean([r["final_reward"] for r in chunk])),
                "mean_train_accuracy": float(np.mean([r["train_accuracy"] for r in chunk])),
                "mean_test_accuracy": float(np.mean([r["test_accuracy"] for r in chunk])),
            }
        )

    payload = {"config": config.to_dict(), "period": period, "episodes": rows, "periods": period_rows}
    out = _out_dir(config)
    _write_csv(
        out / "curves.csv",
        ["episode", "epsilon", "final_reward", "train_accuracy", "test_accuracy"],
        [[r["episode"], r["epsilon"], r["final_reward"], r["train_accuracy"], r["test_accuracy"]] for r in rows],
    )
    _write_csv(
        out / "curves_period.csv",
        ["period", "episode_from", "episode_to", "mean_final_reward",
         "mean_train_accuracy", "mean_test_accuracy"],
        [[p["period"], p["episode_from"], p["episode_to"], p["mean_final_reward"],
          p["mean_train_accuracy"], p["mean_test_accuracy"]] for p in period_rows],
    )
    _write_json(out / "curves.json", payload)
    return payload


class _FitScoreOracle:
    """Fit on one matrix, score subsets on another; memoized like RewardOracle."""

    def __init__(self, kind: ClassifierKind, fit_part: SampleMatrix, score_part: SampleMatrix, seed: int):
        self.kind = kind
        self.fit_part = fit_part
        self.score_part = score_part
        self.seed = seed
        self._cache: dict[State, float] = {}

    def __call__(self, subset: State) -> float:
        key = tuple(subset)
        if key in self._cache:
            return self._cache[key]
        columns = [i - 1 for i in key]
        clf = classifiers.fit(self.kind, project(self.fit_part, columns), self.seed)
        value = classifiers.accuracy(clf, project(self.score_part, columns))
        self._cache[key] = value
        return value


def cmd_timing(
    config: RunConfig,
    subsets: list[list[int]],
    kinds: list[ClassifierKind] | None = None,
    repeats: int = 5,
) -> list[dict]:
    """Median fit time on each projected subset as a percentage of the full-matrix fit."""
    matrix = load_matrix(config)
    kinds = kinds or [ClassifierKind(name) for name in ("dt", "rf", "svm")]
    seed = sub_seed(config.seed, "timing")

    def median_fit_seconds(m: SampleMatrix, kind: ClassifierKind) -> float:
        times = []
        for _ in range(repeats):
            start = time.perf_counter()
            classifiers.fit(kind, m, seed)
            times.append(time.perf_counter() - start)
        return float(np.median(times))

    rows = []
    for kind in kinds:
        full_time = median_fit_seconds(matrix, kind)
        for subset in subsets:
            sub = sorted(int(i) for i in subset)
            sub_time = median_fit_seconds(project(matrix, sub), kind)
            rows.append(
                {
                    "classifier": kind.label(),
                    "subset_size": len(sub),
                    "fit_seconds": sub_time,
                    "full_seconds": full_time,
                    "ratio_pct": 100.0 * sub_time / full_time,
                }
            )
    out = _out_dir(config)
    _write_csv(
        out / "timing.csv",
        ["classifier", "subset_size", "fit_seconds", "full_seconds", "ratio_pct"],
        [[r["classifier"], r["subset_size"], r["fit_seconds"], r["full_seconds"], r["ratio_pct"]] for r in rows],
    )
    _write_json(out / "timing.json", {"config": config.to_dict(), "rows": rows})
    return rows


def cmd_featurize(inputs_dir, ngram_n: int, ngram_k: int, out_csv) -> SampleMatrix:
    """Run the featurization pipeline over a directory of disassembled samples.

    Layout: ``<inputs_dir>/malware/*.opcodes`` and ``<inputs_dir>/benign/*.opcodes``,
    each with a sibling ``<sample>.names`` file. Opcode files hold one Dalvik
    mnemonic per line; names files hold one declared permission or intent
    string per line (intents are recognized by an ``.intent.`` substring).
    The n-gram vocabulary is built from the malware samples only.
    """
    root = Path(inputs_dir)
    samples: list[tuple[str, int, Path, Path]] = []  # (name, label, opcodes, names)
    for label_dir, label in (("benign", 0), ("malware", 1)):
        d = root / label_dir
        if not d.is_dir():
            raise FileNotFoundError(f"missing input directory {d}")
        for opc in sorted(d.glob("*.opcodes")):
            names_file = opc.with_suffix(".names")
            if not names_file.exists():
                raise FileNotFoundError(f"{opc} has no matching names file {names_file}")
            samples.append((opc.stem, label, opc, names_file))
    if not samples:
        raise FileNotFoundError(f"no samples under {root} (expected *.opcodes files)")

    letters = {}
    declared = {}
    for name, label, opc, names_file in samples:
        mnemonics = [ln.strip() for ln in opc.read_text().splitlines() if ln.strip()]
        letters[name] = map_dalvik_to_letters(mnemonics, DEFAULT_OPCODE_MAP)
        declared[name] = [ln.strip() for ln in names_file.read_text().splitlines() if ln.strip()]

    malware_letters = [letters[name] for name, label, _, _ in samples if label == 1]
    if not malware_letters:
        raise FileNotFoundError(f"no malware samples under {root}/malware")
    try:
        vocab = build_vocabulary(malware_letters, ngram_n, ngram_k, source=str(root / "malware"))
    except ValueError as exc:
        raise ValueError(f"{root}/malware: {exc}") from exc

    def is_intent(declared_name: str) -> bool:
        return ".intent." in declared_name

    perm_names = sorted({n for ns in declared.values() for n in ns if not is_intent(n)})
    intent_names = sorted({n for ns in declared.values() for n in ns if is_intent(n)})

    names = tuple(perm_names) + tuple(intent_names) + tuple(vocab.grams)
    categories = (
        ("permission",) * len(perm_names)
        + ("intent",) * len(intent_names)
        + ("ngram",) * len(vocab.grams)
    )
    dictionary = FeatureDictionary(names, categories)

    rows = np.zeros((len(samples), len(names)), dtype=np.uint8)
    labels = np.zeros(len(samples), dtype=np.uint8)
    for i, (name, label, _, _) in enumerate(samples):
        perm_bits, _ = vectorize_declared(declared[name], dictionary, "permission")
        intent_bits, _ = vectorize_declared(declared[name], dictionary, "intent")
        gram_bits = vectorize_ngrams(letters[name], vocab)
        rows[i] = np.concatenate([perm_bits, intent_bits, gram_bits])
        labels[i] = label

    matrix = SampleMatrix(dictionary, rows, labels)
    out_path = Path(out_csv)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_csv(matrix, out_path)
    return matrix
