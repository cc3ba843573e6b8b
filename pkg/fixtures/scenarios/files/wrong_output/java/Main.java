public class Main {
    public static void main(String[] args) {
        SingleLinkedList list = new SingleLinkedList();
        int[] values = {3, 7, 7, 9, 3};
        for (int v : values) {
            list.add(v);
        }
        System.out.println(list);
        list.removeDuplicates();
        System.out.println(list);
    }
}
