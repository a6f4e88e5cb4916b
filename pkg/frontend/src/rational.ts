/**
 * Exact rationals on bigint.
 *
 * The server speaks "p/q" strings and the game's guarantees are exact, so
 * the client never stores numbers for state — only these rationals (or the
 * server's strings verbatim). Floating point appears solely in display
 * helpers at the very edge of rendering.
 */

export interface Rational {
  readonly num: bigint;
  readonly den: bigint; // always > 0, lowest terms
}

export class RationalParseError extends Error {}

function bgcd(a: bigint, b: bigint): bigint {
  let x = a < 0n ? -a : a;
  let y = b < 0n ? -b : b;
  while (y !== 0n) {
    [x, y] = [y, x % y];
  }
  return x;
}

export function makeRational(num: bigint, den: bigint): Rational {
  if (den === 0n) throw new RationalParseError("zero denominator");
  if (den < 0n) {
    num = -num;
    den = -den;
  }
  if (num === 0n) return { num: 0n, den: 1n };
  const g = bgcd(num, den);
  return { num: num / g, den: den / g };
}

const INT_RE = /^-?\d+$/;
const FRAC_RE = /^(-?\d+)\/(\d+)$/;
const DECIMAL_RE = /^(-?)(\d+)\.(\d+)$/;

/**
 * Parse "p/q", an integer literal, or a finite decimal ("0.5" becomes 1/2
 * exactly). Anything else — including repeating-decimal notation — is a
 * RationalParseError, raised before any network call.
 */
export function parseRational(text: string): Rational {
  const t = text.trim();
  if (INT_RE.test(t)) return makeRational(BigInt(t), 1n);
  const frac = FRAC_RE.exec(t);
  if (frac !== null) return makeRational(BigInt(frac[1]!), BigInt(frac[2]!));
  const dec = DECIMAL_RE.exec(t);
  if (dec !== null) {
    const sign = dec[1] === "-" ? -1n : 1n;
    const whole = BigInt(dec[2]!);
    const fracDigits = dec[3]!;
    const scale = 10n ** BigInt(fracDigits.length);
    return makeRational(sign * (whole * scale + BigInt(fracDigits)), scale);
  }
  throw new RationalParseError(`not an exact rational: ${JSON.stringify(text)}`);
}

/** Canonical wire form "p/q", denominator always explicit. */
export function formatRational(r: Rational): string {
  return `${r.num}/${r.den}`;
}

export function add(a: Rational, b: Rational): Rational {
  return makeRational(a.num * b.den + b.num * a.den, a.den * b.den);
}

export function sub(a: Rational, b: Rational): Rational {
  return makeRational(a.num * b.den - b.num * a.den, a.den * b.den);
}

export function mul(a: Rational, b: Rational): Rational {
  return makeRational(a.num * b.num, a.den * b.den);
}

export function half(a: Rational): Rational {
  return makeRational(a.num, a.den * 2n);
}

/** -1, 0, or 1 as a < b, a == b, a > b. */
export function compare(a: Rational, b: Rational): -1 | 0 | 1 {
  const left = a.num * b.den;
  const right = b.num * a.den;
  return left < right ? -1 : left > right ? 1 : 0;
}

export const ZERO: Rational = { num: 0n, den: 1n };
export const ONE: Rational = { num: 1n, den: 1n };

/** Display-only approximation; never fed back into state. */
export function toNumber(r: Rational): number {
  const quot = Number(r.num / r.den);
  const rem = makeRational(r.num % r.den, r.den);
  return quot + Number(rem.num) / Number(rem.den);
}

/** log2 of a positive rational, for convergence plots (display only). */
export function log2Approx(r: Rational): number {
  if (r.num <= 0n) throw new RangeError("log2 of a non-positive rational");
  const numBits = r.num.toString(2).length;
  const denBits = r.den.toString(2).length;
  const shift = BigInt(numBits - denBits);
  // scale into [1/2, 2) so the float conversion is safe for huge values
  const scaled =
    shift >= 0n
      ? makeRational(r.num, r.den << shift)
      : makeRational(r.num << -shift, r.den);
  return Number(shift) + Math.log2(toNumber(scaled));
}
