"use strict";
const greeting = "Hello, world";
const unicode = "café \u{1F600} 日本語 ✓";
const escapes = 'tab\there\nnewline \\ backslash \'quote\' "dq"';
const line = "line sep";
console.log(greeting.toUpperCase(), greeting.length);
console.log(unicode, unicode.length, [...unicode].length);
console.log(escapes);
console.log(JSON.stringify(line));
console.log("\x41\x42\x43", "\0".charCodeAt(0));
const tpl = `multi
line ${greeting.slice(0, 5)} ${1 + 2}`;
console.log(tpl);
function tag(parts, ...values) { return parts.raw.join("|") + values.join(","); }
console.log(tag`a${1}b${2}c\n`);
const obj = { "quoted-key": 1, plain: 2, 'single': 3, ["comp" + "uted"]: 4 };
console.log(Object.keys(obj).join(","), obj["quoted-key"], obj.computed);
console.log("abc".repeat(3).split("b").join("-"));
const lookup = { alpha: "first", beta: "second" };
console.log(lookup.alpha + lookup.beta, "alpha" in lookup);
