function grade(score) {
  switch (true) {
    case score >= 90: return "A";
    case score >= 80: return "B";
    default: return "C";
  }
}
console.log([95, 85, 40].map(grade).join(""));
outer: for (let i = 0; i < 5; i++) {
  for (let j = 0; j < 5; j++) {
    if (j > i) continue outer;
    if (i === 4) break outer;
    process.stdout.write(i + "" + j + " ");
  }
}
console.log();
let n = 0;
do { n += 3; } while (n < 20);
console.log(n);
let text = "";
for (const key in { p: 1, q: 2, r: 3 }) text += key;
console.log(text);
function risky(flag) {
  try {
    if (flag) throw new TypeError("bad flag");
    return "fine";
  } catch ({ name, message }) {
    return name + ": " + message;
  } finally {
    console.log("finally", flag);
  }
}
console.log(risky(true), risky(false));
var result = 0, step = 1;
while (true) { result += step; if (result > 50) break; step *= 2; }
console.log(result, step)
const asi = 1
const next = [1, 2]
console.log(asi + next.length)
