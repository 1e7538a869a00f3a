//! Plain Eratosthenes sieve. Nothing clever; the multiplicative work happens
//! in [`crate::table`].

/// All primes `<= n` in increasing order.
pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::with_capacity(if n > 16 { n / (n.ilog2() as usize) } else { 8 });
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut m = i * i;
            while m <= n {
                composite[m] = true;
                m += i;
            }
        }
        i += 1;
    }
    for (p, &c) in composite.iter().enumerate().skip(2) {
        if !c {
            primes.push(p as u64);
        }
    }
    primes
}
