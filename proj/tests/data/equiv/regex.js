const dates = "2024-01-05, 2023-12-31 and 1999-07-04";
const re = /(\d{4})-(\d{2})-(\d{2})/g;
let m;
const years = [];
while ((m = re.exec(dates)) !== null) years.push(m[1]);
console.log(years.join("/"));
console.log("a/b/c".split(/\//).length, /[/]/.test("x/y"));
const named = /(?<word>[a-z]+)(?<num>\d+)/u.exec("abc123");
console.log(named.groups.word, named.groups.num);
console.log("Hello World".replace(/o/g, "0"), 10 / 2 / 5);
const slashy = 4 / 2; const g = 2;
console.log(slashy / g / 1);
