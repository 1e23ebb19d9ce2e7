// Copyright 2026 The zeno-dyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zeno/operator_core.hpp"

namespace zeno {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_letter(Pauli p) {
    return "IXYZ"[static_cast<std::uint8_t>(p)];
}

/// A signed n-qubit Pauli product. Qubit 1 is the leftmost tensor factor
/// (most significant bit of the computational index), matching tensor()'s
/// composite-index convention. The dense realization is Hermitian with
/// eigenvalues ±1 whenever the string is nontrivial.
class PauliString {
  public:
    PauliString(int n_qubits, int sign = +1)
        : letters_(static_cast<std::size_t>(n_qubits), Pauli::I), sign_(sign) {
        if (n_qubits < 1 || n_qubits > 24)
            throw ValidationError("PauliString: unsupported qubit count");
        if (sign != 1 && sign != -1)
            throw ValidationError("PauliString: sign must be +1 or -1");
    }

    /// Parse strings like "XZI" or "-IYX" (leftmost letter = qubit 1).
    static PauliString parse(const std::string& text) {
        std::string body = text;
        int sign = +1;
        if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
            sign = body.front() == '-' ? -1 : +1;
            body.erase(body.begin());
        }
        PauliString out(static_cast<int>(body.size()), sign);
        for (std::size_t i = 0; i < body.size(); ++i) {
            switch (body[i]) {
                case 'I': out.letters_[i] = Pauli::I; break;
                case 'X': out.letters_[i] = Pauli::X; break;
                case 'Y': out.letters_[i] = Pauli::Y; break;
                case 'Z': out.letters_[i] = Pauli::Z; break;
                default: throw ValidationError("PauliString: bad letter in '" + text + "'");
            }
        }
        return out;
    }

    int n_qubits() const { return static_cast<int>(letters_.size()); }
    Index dim() const { return Index(1) << n_qubits(); }
    int sign() const { return sign_; }

    Pauli letter(int qubit) const { return letters_.at(static_cast<std::size_t>(qubit - 1)); }
    PauliString& set(int qubit, Pauli p) {
        letters_.at(static_cast<std::size_t>(qubit - 1)) = p;
        return *this;
    }

    std::string to_string() const {
        std::string out = sign_ < 0 ? "-" : "";
        for (Pauli p : letters_) out.push_back(pauli_letter(p));
        return out;
    }

    /// Symplectic commutation test: strings commute iff the number of
    /// positions with differing non-identity letters is even.
    bool commutes_with(const PauliString& other) const {
        if (n_qubits() != other.n_qubits())
            throw ValidationError("commutes_with: qubit count mismatch");
        int anti = 0;
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            const Pauli a = letters_[i], b = other.letters_[i];
            if (a != Pauli::I && b != Pauli::I && a != b) ++anti;
        }
        return anti % 2 == 0;
    }

    /// Bit masks over computational indices (qubit 1 = most significant).
    std::uint64_t x_mask() const { return mask_of(Pauli::X) | mask_of(Pauli::Y); }
    std::uint64_t zy_mask() const { return mask_of(Pauli::Z) | mask_of(Pauli::Y); }
    int y_count() const {
        int n = 0;
        for (Pauli p : letters_)
            if (p == Pauli::Y) ++n;
        return n;
    }

    /// Amplitude picked up by basis state |i⟩: P|i⟩ = amp(i) |i XOR x_mask⟩.
    Complex amplitude(std::uint64_t i) const {
        static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        Complex amp = kIPow[y_count() % 4] * static_cast<double>(sign_);
        const int parity = __builtin_popcountll(i & zy_mask()) & 1;
        return parity ? -amp : amp;
    }

    /// out = P ψ in O(dim).
    void apply_to(const StateVector& psi, StateVector& out) const {
        const Index d = dim();
        if (psi.size() != d) throw ValidationError("PauliString::apply_to: dim mismatch");
        out.resize(d);
        const std::uint64_t flip = x_mask();
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(d); ++i)
            out(static_cast<Index>(i ^ flip)) = amplitude(i) * psi(static_cast<Index>(i));
    }

    StateVector apply_to(const StateVector& psi) const {
        StateVector out;
        apply_to(psi, out);
        return out;
    }

    /// P ρ P (P is a Hermitian involution) in O(dim²).
    ComplexOperator conjugate_density(const ComplexOperator& rho) const {
        const Index d = dim();
        if (rho.rows() != d || rho.cols() != d)
            throw ValidationError("PauliString::conjugate_density: dim mismatch");
        const std::uint64_t flip = x_mask();
        ComplexOperator out(d, d);
        for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(d); ++col) {
            const Complex c_amp = std::conj(amplitude(col));
            const Index target_col = static_cast<Index>(col ^ flip);
            for (std::uint64_t row = 0; row < static_cast<std::uint64_t>(d); ++row)
                out(static_cast<Index>(row ^ flip), target_col) =
                    amplitude(row) * rho(static_cast<Index>(row), static_cast<Index>(col)) * c_amp;
        }
        return out;
    }

    ComplexOperator dense() const {
        const Index d = dim();
        ComplexOperator out = ComplexOperator::Zero(d, d);
        const std::uint64_t flip = x_mask();
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(d); ++i)
            out(static_cast<Index>(i ^ flip), static_cast<Index>(i)) = amplitude(i);
        return out;
    }

    /// True when the string is diagonal in the computational basis.
    bool is_diagonal() const { return x_mask() == 0; }

    /// ⟨ψ| P |ψ⟩, O(dim).
    double expectation(const StateVector& psi) const {
        const Index d = dim();
        if (psi.size() != d) throw ValidationError("PauliString::expectation: dim mismatch");
        const std::uint64_t flip = x_mask();
        Complex sum = 0.0;
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(d); ++i)
            sum += std::conj(psi(static_cast<Index>(i ^ flip))) * amplitude(i) *
                   psi(static_cast<Index>(i));
        return sum.real();
    }

  private:
    std::uint64_t mask_of(Pauli which) const {
        std::uint64_t mask = 0;
        const int n = n_qubits();
        for (int q = 1; q <= n; ++q)
            if (letters_[static_cast<std::size_t>(q - 1)] == which)
                mask |= std::uint64_t(1) << (n - q);
        return mask;
    }

    std::vector<Pauli> letters_;
    int sign_ = +1;
};

/// Single-qubit letter embedded into an n-qubit string.
inline PauliString single_site(int n_qubits, int qubit, Pauli p) {
    PauliString out(n_qubits);
    out.set(qubit, p);
    return out;
}

/// Two-site product embedded into an n-qubit string.
inline PauliString two_site(int n_qubits, int qubit_a, Pauli a, int qubit_b, Pauli b) {
    if (qubit_a == qubit_b) throw ValidationError("two_site: qubits must differ");
    PauliString out(n_qubits);
    out.set(qubit_a, a);
    out.set(qubit_b, b);
    return out;
}

}  // namespace zeno
