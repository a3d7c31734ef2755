// Direct eval sees the enclosing bindings by name.
function withEval(seed) {
  var localCounter = seed * 2;
  var label = "ev";
  return eval("label + ':' + (localCounter + 1)");
}
function plain(alpha, beta) {
  var product = alpha * beta;
  return product + alpha;
}
console.log(withEval(20));
console.log(plain(3, 4));
var globalMessage = "from global";
console.log(eval("globalMessage.length"));
