"""Barrier, derivative and combined losses with exact gradients."""

from dataclasses import dataclass

import numpy as np

from airl.policy import Policy, policy_mean
from cbf.barrier import Barrier, CbfConfig, barrier_values
from diffnet import backward
from dynamics import EnvConfig, transition_observation, transition_vjp
from errors import UsageError


@dataclass(frozen=True, eq=False)
class DerivativeTerms:
    """
    L_derivative pieces over the explored states with h >= 0.

    Attributes:
        loss: Sum (or mean, if normalized) of the hinge terms
        grad_policy: Gradient with respect to the policy params
        grad_barrier: Gradient with respect to the barrier params
        n_states: Number of states with h >= 0 that contributed
    """

    loss: float
    grad_policy: np.ndarray
    grad_barrier: np.ndarray
    n_states: int


def barrier_loss_and_grad(
    b: Barrier,
    safe: np.ndarray,
    pd: np.ndarray,
    m_s: float = 0.0,
    m_pd: float = 0.0,
    normalizer: float = 1.0,
):
    """
    sum_safe max(m_s - h, 0) + sum_pd max(m_pd + h, 0), divided by normalizer.

    Either set may be empty here; barrier_loss() insists on both.

    Returns:
        Tuple of (loss, gradient with respect to b.params)
    """
    grad = np.zeros_like(b.params)
    loss = 0.0
    if len(safe):
        hinge = m_s - barrier_values(b, safe)
        active = hinge > 0
        loss += float(np.sum(hinge * active))
        g, _ = backward(b.h_net, np.atleast_2d(safe), (-1.0 * active)[:, None] / normalizer)
        grad += g
    if len(pd):
        hinge = m_pd + barrier_values(b, pd)
        active = hinge > 0
        loss += float(np.sum(hinge * active))
        g, _ = backward(b.h_net, np.atleast_2d(pd), (1.0 * active)[:, None] / normalizer)
        grad += g
    return loss / normalizer, grad


def barrier_loss(
    b: Barrier, safe: np.ndarray, pd: np.ndarray, m_s: float = 0.0, m_pd: float = 0.0
) -> float:
    """
    Hinge loss pushing h up on safe states and down on dangerous ones.

    With m_s = m_pd = 0 this is exactly the unmargined barrier loss, which
    h = 0 everywhere also minimizes; the margins rule that out.
    """
    if len(safe) == 0 or len(pd) == 0:
        raise UsageError("barrier_loss needs non-empty safe and pd sets")
    return barrier_loss_and_grad(b, safe, pd, m_s, m_pd)[0]


def derivative_hinge(
    h_now: np.ndarray, h_next: np.ndarray, dt: float, lam: float
) -> np.ndarray:
    """max(-(h(s') - h(s)) / dt - lam * h(s), 0) per state."""
    return np.maximum(-(h_next - h_now) / dt - lam * h_now, 0.0)


def r3_slack(h_now: np.ndarray, h_next: np.ndarray, dt: float, lam: float) -> np.ndarray:
    """(h(s') - h(s)) / dt + lam * h(s); R3 holds where this is >= 0."""
    return (h_next - h_now) / dt + lam * h_now


def derivative_terms(
    b: Barrier,
    p: Policy,
    states: np.ndarray,
    cfg: CbfConfig,
    env: EnvConfig,
    normalize: bool = False,
) -> DerivativeTerms:
    """
    L_derivative and its gradients for both nets.

    Only states with h(s) >= 0 contribute. The action is the policy mean and
    T is the observation-space transition, so the policy gradient flows
    through the action into h(T(s, a)).
    """
    states = np.atleast_2d(states)
    n_policy = p.params.size
    if len(states) == 0:
        return DerivativeTerms(0.0, np.zeros(n_policy), np.zeros_like(b.params), 0)
    h_all = barrier_values(b, states)
    chosen = states[h_all >= 0]
    if len(chosen) == 0:
        return DerivativeTerms(0.0, np.zeros(n_policy), np.zeros_like(b.params), 0)

    h_now = h_all[h_all >= 0]
    actions = np.atleast_2d(policy_mean(p, chosen))
    next_states = transition_observation(chosen, actions, env)
    h_next = barrier_values(b, next_states)

    argument = -(h_next - h_now) / cfg.dt - cfg.lam * h_now
    active = (argument > 0).astype(np.float64)
    scale = 1.0 / len(chosen) if normalize else 1.0
    loss = float(np.sum(argument * active)) * scale

    g_next = -active / cfg.dt * scale
    g_now = (active / cfg.dt - cfg.lam * active) * scale
    grad_next, cot_next = backward(b.h_net, next_states, g_next[:, None])
    grad_now, _ = backward(b.h_net, chosen, g_now[:, None])

    g_action = transition_vjp(chosen, actions, cot_next, env)
    grad_mean, _ = backward(p.mean_net, chosen, g_action)
    grad_policy = np.concatenate([grad_mean, np.zeros(len(p.log_std))])
    return DerivativeTerms(loss, grad_policy, grad_next + grad_now, len(chosen))


def derivative_loss(
    b: Barrier, p: Policy, states: np.ndarray, cfg: CbfConfig, env: EnvConfig
) -> float:
    """Sum over explored states with h >= 0 of the R3 hinge."""
    return derivative_terms(b, p, states, cfg, env).loss


def combined_loss(policy_term: float, derivative_term: float, w: float) -> float:
    """L_policy + w * L_derivative; with w = 0 the policy term comes back untouched."""
    if w == 0:
        return policy_term
    return policy_term + w * derivative_term


def combined_grad(
    policy_grad: np.ndarray, derivative_grad: np.ndarray, w: float
) -> np.ndarray:
    if w == 0:
        return policy_grad
    return policy_grad + w * derivative_grad
