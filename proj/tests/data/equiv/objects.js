const base = { kind: "base", hello() { return "hi " + this.kind; } };
const derived = Object.create(base);
derived.kind = "derived";
console.log(derived.hello(), base.hello());
const { kind, missing = "default", ...others } = { kind: "k", a: 1, b: 2 };
console.log(kind, missing, JSON.stringify(others));
const merged = { ...others, c: 3 };
console.log(Object.entries(merged).map(([k, v]) => k + v).join(";"));
const point = { x: 1, y: 2, get length() { return Math.hypot(this.x, this.y); } };
console.log(point.length.toFixed(3));
const maybe = null;
console.log(maybe?.deep?.value, maybe ?? "fallback");
let counter = 0;
counter ||= 5; counter &&= counter + 1; let nothing = null; nothing ??= "set";
console.log(counter, nothing);
const map = new Map([["one", 1], ["two", 2]]);
for (const [name, value] of map) console.log(name, value);
const sym = Symbol("tag");
const withSym = { [sym]: "symbol value" };
console.log(withSym[sym], typeof sym);
const frozen = Object.freeze({ inner: { value: 1 } });
frozen.inner.value = 2;
console.log(frozen.inner.value);
delete derived.kind;
console.log(derived.kind);
