//! Arithmetic substrate: primes, Bernoulli numbers and Dirichlet characters.

mod bernoulli;
mod characters;
mod sieve;

pub use bernoulli::{bernoulli_f64, bernoulli_numbers, BERNOULLI_EXACT_MAX};
pub use characters::{characters_mod, gcd, DirichletCharacter, MAX_CHARACTER_MODULUS};
pub use sieve::{is_prime, primes_up_to, PrimeTable};
