"""
sdwbound Demo Script
A short tour: constants, one fixed-point solve and its asymptotic counterpart
"""

from sdwbound import constants, deformation, solve, total_energy
from sdwbound.asymptotics import C_CONSTANT, asymptotic_solution, eps0, scaled_constant
from sdwbound.fermi_gas import delta_e_fg_leading, optimal_h


def show_constants():
    """Display the model constants"""
    print("\n📊 Model Constants")
    print("=" * 30)
    c = constants()
    print(f"  a_V     = {c.a_V:.7f}")
    print(f"  a_K/a_V = {c.ratio_KV:.4f}")
    print(f"  C       = {C_CONSTANT:.4f}")
    print(f"  Delta E r_s^2/eps^3 (r_s -> 0) = {scaled_constant(0.5):.4f}")


def show_solve(r_s=3.0, h=0.5):
    """Solve at the asymptotic optimum and compare with the closed form"""
    print(f"\n🔁 Fixed Point at r_s = {r_s}")
    print("=" * 30)
    eps = eps0(r_s, h)
    d = deformation(r_s, eps, h)
    result = solve(d)
    asym = asymptotic_solution(r_s, eps, h)
    print(f"  eps0 = {eps:.4e}, gamma = {d.gamma:.3f}, optimal h = {optimal_h(d.gamma):.3f}")
    print(f"  {result.solution.iterations} iterations on {result.grid.size} nodes, "
          f"xi(x_min) = {result.solution.xi[0]:.5f}")
    print(f"  Delta E_SDW numeric    = {result.energy.delta_e:.4e} Ha")
    print(f"  Delta E_SDW asymptotic = {asym.delta_e_sdw:.4e} Ha")
    print(f"  Delta E_FG leading     = {delta_e_fg_leading(d):.4e} Ha")


def show_total_energy(r_s=1.0):
    """Total energy across a few deformations around eps0"""
    print(f"\n📈 Total Energy at r_s = {r_s}")
    print("=" * 30)
    center = eps0(r_s, 0.5)
    for factor in (0.25, 0.5, 1.0, 2.0, 4.0):
        report = total_energy(r_s, center * factor, 0.5)
        mark = "✅" if report.delta_e_total < 0 else "❌"
        print(f"  {mark} eps = {report.eps_star:.3e}: Delta E = {report.delta_e_total:+.4e} Ha, "
              f"scaled = {report.scaled_energy:+.4f}")


if __name__ == "__main__":
    print("🧲 Welcome to sdwbound!")
    print("Hartree-Fock upper bounds on SDW energies of jellium")

    show_constants()
    show_solve()
    show_total_energy()

    print("\n" + "=" * 50)
    print(f"🎯 Small-r_s limit of the scaled energy: {scaled_constant(0.5):.3f}")
    print("📚 See README.md for the command-line interface")
    print("=" * 50)
