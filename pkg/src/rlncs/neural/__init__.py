from .checkpoint import load_checkpoint, save_checkpoint
from .dense import DenseParams, dense_backward, dense_forward, init_dense, relu, sigmoid
from .losses import dqn_loss, dqn_loss_grad, joint_loss, lstm_loss, lstm_loss_grad
from .lstm import (LstmCarry, LstmLayerParams, LstmParams, init_lstm, lstm_forward,
                   lstm_train_backward, lstm_train_forward, zero_carry)
from .optim import LrSchedule, clip_global_norm, global_norm, sgd_step
from .qnet import (N_ACTIONS, QNetParams, init_qnet, q_backward, q_forward,
                   q_forward_cache, q_output_scale)
from .tree import named_arrays, tree_combine, tree_copy, tree_map

__all__ = [
    "DenseParams", "LstmCarry", "LstmLayerParams", "LstmParams", "LrSchedule",
    "N_ACTIONS", "QNetParams", "clip_global_norm", "dense_backward", "dense_forward",
    "dqn_loss", "dqn_loss_grad", "global_norm", "init_dense", "init_lstm", "init_qnet",
    "joint_loss", "load_checkpoint", "lstm_forward", "lstm_loss", "lstm_loss_grad",
    "lstm_train_backward", "lstm_train_forward", "named_arrays", "q_backward",
    "q_forward", "q_forward_cache", "q_output_scale", "relu", "save_checkpoint",
    "sgd_step", "sigmoid", "tree_combine", "tree_copy", "tree_map", "zero_carry",
]
