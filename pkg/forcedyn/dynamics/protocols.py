"""
The transition-model interface shared by the learned model, the grid oracle
and test doubles.

Everything downstream of the dynamics (planning, evaluation, offline policy
training) talks to a TransitionModel and never to a concrete network.
"""

from typing import Any, Protocol, Tuple, runtime_checkable

import numpy as np


@runtime_checkable
class TransitionModel(Protocol):
    """
    Batched one-step force-state predictor.

    ``hidden`` is opaque to callers: an LSTM state for the learned model, the
    believed position for the grid oracle.
    """

    def initial_hidden(self, states: np.ndarray) -> Any:
        """Fresh hidden value for a batch of ``(B, 30)`` start states."""

    def forward(
        self, states: np.ndarray, actions: np.ndarray, hidden: Any
    ) -> Tuple[np.ndarray, Any]:
        """
        Predict ``(B, 30)`` next states from ``(B, 30)`` states and ``(B, 2)`` actions.

        Returns:
            (predicted states in raw units, next hidden value)
        """
