"""Structural-block driven convolutional relation extraction."""

__version__ = "0.1.0"

from .blocks import StructuralBlock, aggreg_block, enrich, seq_tokens, single_block, structural_block
from .corpus import (
    RawInstance,
    SentenceInstance,
    Token,
    Vocab,
    align_conllu,
    build_vocab,
    dataset_stats,
    load_embeddings,
    parse_raw,
    read_conllu,
)
from .deptree import DepTree, build_tree
from .metrics import Metrics, compute_metrics, macro_f1
from .model import ModelConfig, ModelParams, forward, init_params, load_checkpoint, save_checkpoint
from .train import TrainConfig, ablation, evaluate, train
