#include "remest/estimator.hpp"

namespace remest {

RemoteState initial_remote_state(const SystemModel& model, const Vector& xs0) {
    RemoteState st;
    st.xhat = xs0;
    st.p = model.pbar;
    st.tau = 1;
    st.last_rx = xs0;
    return st;
}

RemoteState on_receipt(const RemoteState& state, const Vector& xs,
                       const SystemModel& model) {
    RemoteState next;
    next.xhat = xs;
    next.p = model.pbar;
    next.tau = holding_time_update(state.tau, 1);
    next.last_rx = xs;
    return next;
}

RemoteState on_drop(const RemoteState& state, const Matrix& psi_tau,
                    const SystemModel& model, MatrixPowers& powers) {
    RemoteState next;
    next.xhat = powers.of(state.tau) * state.last_rx;
    next.p = model.pbar + psi_tau;
    next.tau = holding_time_update(state.tau, 0);
    next.last_rx = state.last_rx;
    return next;
}

RemoteState on_drop_baseline(const RemoteState& state, const SystemModel& model,
                             MatrixPowers& powers) {
    RemoteState next;
    next.xhat = powers.of(state.tau) * state.last_rx;
    next.p = lyapunov_step(state.p, model);
    next.tau = holding_time_update(state.tau, 0);
    next.last_rx = state.last_rx;
    return next;
}

}  // namespace remest
