function makeAccumulator(start) {
  var total = start;
  return function (delta) {
    total += delta;
    return total;
  };
}
var acc = makeAccumulator(10);
acc(5);
console.log(acc(7));
var makers = [];
for (let index = 0; index < 4; index++) {
  makers.push(() => index * index);
}
console.log(makers.map((fn) => fn()).join(","));
var legacy = [];
for (var position = 0; position < 3; position++) {
  legacy.push(function () { return position; });
}
console.log(legacy.map(function (fn) { return fn(); }).join(","));
function once(fn) {
  var done = false, result;
  return function () {
    if (!done) { done = true; result = fn.apply(this, arguments); }
    return result;
  };
}
var init = once(function (a, b) { return a + b; });
console.log(init(2, 3), init(9, 9));
