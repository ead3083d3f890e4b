#ifndef REMEST_ESTIMATOR_HPP
#define REMEST_ESTIMATOR_HPP

#include "remest/plant.hpp"

namespace remest {

/// Remote MMSE estimator state. `tau` is the holding time that applies to
/// the upcoming slot; the update functions read it before advancing it.
/// The Sigma/Psi parameter pair itself lives in the PowerController, which
/// both sides of the link mirror deterministically from the ack stream.
struct RemoteState {
    Vector xhat;
    Matrix p;
    int tau = 1;
    Vector last_rx;
};

/// gamma_0 = 1 convention: the estimator starts holding the sensor's
/// initial estimate, so the first slot runs at tau = 1.
RemoteState initial_remote_state(const SystemModel& model, const Vector& xs0);

/// Receipt: adopt the local estimate, covariance collapses to pbar.
RemoteState on_receipt(const RemoteState& state, const Vector& xs,
                       const SystemModel& model);

/// Drop under a data-driven policy: predict from the last received
/// estimate, covariance pbar + Psi_tau (the mirrored posterior parameter).
RemoteState on_drop(const RemoteState& state, const Matrix& psi_tau,
                    const SystemModel& model, MatrixPowers& powers);

/// Drop under a non-data-driven policy: same predicted estimate, but the
/// covariance follows the open-loop recursion P = h(P_prev).
RemoteState on_drop_baseline(const RemoteState& state, const SystemModel& model,
                             MatrixPowers& powers);

/// tau resets to 1 on a receipt and increments on a drop.
inline int holding_time_update(int tau, int gamma) {
    return gamma ? 1 : tau + 1;
}

}  // namespace remest

#endif  // REMEST_ESTIMATOR_HPP
