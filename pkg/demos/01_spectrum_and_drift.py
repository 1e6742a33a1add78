"""From a drift to its Schrodinger spectrum and back.

The linear-restoring (Ornstein-Uhlenbeck) drift D = -x has prepotential
W = x^2/4; the associated operator -d2/dx2 + W'^2 - W'' is the harmonic
oscillator shifted to put its ground level at zero, so the eigenvalues
are the integers.  The ground state squared is the stationary density,
and its logarithmic derivative returns the drift we started from.
"""

from isofokker import (
    build_hamiltonian,
    ground_state_to_drift,
    integrate,
    make_grid,
    ou_scenario,
    sample,
    solve_spectrum,
    sup_diff,
)

grid = make_grid(-12.0, 12.0, 2001)
drift = ou_scenario(grid)

spectrum = solve_spectrum(build_hamiltonian(drift.W), kmax=7)
print("eigenvalues (should be 0, 1, ..., 7):")
for k, eps in enumerate(spectrum.energies):
    print(f"  eps_{k} = {eps:+.6f}   (error {eps - k:+.2e})")

phi0 = spectrum.state(0)
stationary = phi0 * phi0
print(f"\nstationary density: mass = {integrate(stationary):.12f}, "
      f"variance = {integrate(sample(grid, lambda x: x**2) * stationary):.6f} (exact: 1)")

recovered = ground_state_to_drift(phi0)
err = sup_diff(recovered.D, drift.D, window=(-8, 8))
print(f"drift recovered from the ground state: max |D_rec - D| on |x|<=8 = {err:.2e}")

print("\northonormality of the solved basis:")
worst = max(
    abs(integrate(spectrum.state(j) * spectrum.state(k)) - (j == k))
    for j in range(8) for k in range(8)
)
print(f"  max |<phi_j, phi_k> - delta_jk| = {worst:.2e}")
