public class Main {
    public static void main(String[] args) {
        ArrayBinaryTree tree = new ArrayBinaryTree(7);
        tree.setRoot(50);
        tree.setLeft(0, 30);
        tree.setRight(0, 70);
        tree.setLeft(1, 20);
        tree.setRight(1, 40);
        tree.setLeft(2, 60);
        tree.setRight(2, 80);
        tree.setLeft(3, 10);
        System.out.println("size: " + tree.size());
    }
}
