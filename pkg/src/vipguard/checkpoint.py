"""Checkpoint files: full agent state as versioned JSON.

Everything needed to resume or deploy is written in one document: actor and
critic weights, their target copies, and both Adam states, plus a caller
metadata block. Floats serialize through repr so a load-save cycle is exact.
Writes go to a sibling temp file and rename into place, so an interrupted
run never leaves a half-written checkpoint behind.
"""

from __future__ import annotations

import json
import os
from typing import Any, Sequence

import numpy as np

from .nets import AdamState, Mlp
from .trainer import AgentNets
from .world import ConfigurationError

FORMAT = "vipguard-checkpoint"
SCHEMA_VERSION = 1


def _mlp_to_doc(net: Mlp) -> dict[str, Any]:
    return {
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }


def _mlp_from_doc(doc: dict[str, Any]) -> Mlp:
    weights = [np.asarray(w, dtype=float) for w in doc["weights"]]
    biases = [np.asarray(b, dtype=float) for b in doc["biases"]]
    return Mlp(weights=weights, biases=biases)


def _adam_to_doc(state: AdamState) -> dict[str, Any]:
    return {
        "lr": state.lr,
        "beta1": state.beta1,
        "beta2": state.beta2,
        "eps": state.eps,
        "step": state.step,
        "m": [m.tolist() for m in state.m],
        "v": [v.tolist() for v in state.v],
    }


def _adam_from_doc(doc: dict[str, Any]) -> AdamState:
    return AdamState(
        lr=float(doc["lr"]),
        beta1=float(doc["beta1"]),
        beta2=float(doc["beta2"]),
        eps=float(doc["eps"]),
        step=int(doc["step"]),
        m=[np.asarray(m, dtype=float) for m in doc["m"]],
        v=[np.asarray(v, dtype=float) for v in doc["v"]],
    )


def save_checkpoint(path: str, nets: Sequence[AgentNets], meta: dict[str, Any]) -> None:
    doc = {
        "format": FORMAT,
        "schema_version": SCHEMA_VERSION,
        "meta": meta,
        "agents": [
            {
                "actor": _mlp_to_doc(agent.actor),
                "critic": _mlp_to_doc(agent.critic),
                "target_actor": _mlp_to_doc(agent.target_actor),
                "target_critic": _mlp_to_doc(agent.target_critic),
                "actor_opt": _adam_to_doc(agent.actor_opt),
                "critic_opt": _adam_to_doc(agent.critic_opt),
            }
            for agent in nets
        ],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")
    os.replace(tmp, path)


def load_checkpoint(path: str) -> tuple[list[AgentNets], dict[str, Any]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"corrupt checkpoint {path}: {err}") from err
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ConfigurationError(f"{path} is not a {FORMAT} file")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigurationError(
            f"{path} has schema_version {doc.get('schema_version')!r}, "
            f"this build reads {SCHEMA_VERSION}"
        )
    nets = []
    for agent_doc in doc["agents"]:
        nets.append(
            AgentNets(
                actor=_mlp_from_doc(agent_doc["actor"]),
                critic=_mlp_from_doc(agent_doc["critic"]),
                target_actor=_mlp_from_doc(agent_doc["target_actor"]),
                target_critic=_mlp_from_doc(agent_doc["target_critic"]),
                actor_opt=_adam_from_doc(agent_doc["actor_opt"]),
                critic_opt=_adam_from_doc(agent_doc["critic_opt"]),
            )
        )
    return nets, doc["meta"]
