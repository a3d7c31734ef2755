function sum() {
  var total = 0;
  for (var i = 0; i < arguments.length; i++) total += arguments[i];
  return total;
}
console.log(sum(1, 2, 3, 4));
const counter = {
  count: 0,
  incrementLater() {
    const bump = () => { this.count++; return this.count; };
    return bump() + bump();
  },
};
console.log(counter.incrementLater(), counter.count);
function Legacy(value) { this.value = value; }
Legacy.prototype.double = function () { return this.value * 2; };
console.log(new Legacy(21).double());
const bound = function (suffix) { return this.prefix + suffix; }.bind({ prefix: "pre-" });
console.log(bound("fix"));
